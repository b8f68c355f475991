class Calls {
    void report(int n) {
        if (n > 0) {
            log(n);
        } else {
            warn(n);
        }
    }

    void drain(Queue q) {
        while (q.hasNext()) {
            q.next();
        }
    }

    int guarded(int x) {
        log(x);
        if (x > 5) {
            x = 5;
        }
        return x;
    }

    void mixed(int[] xs) {
        for (int i = 0; i < xs.length; i++) {
            if (xs[i] < 0) {
                continue;
            }
            if (xs[i] > 100) {
                alert(i);
            }
        }
    }

    int pick(boolean f, int a, int b) {
        return f ? a : b;
    }

    void empty() {
    }
}
