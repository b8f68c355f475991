class Basic {
    int add(int a, int b) {
        return a + b;
    }

    int abs(int x) {
        if (x < 0) {
            x = -x;
        }
        return x;
    }

    int max3(int a, int b, int c) {
        int m = a;
        if (b > m) {
            m = b;
        }
        if (c > m) {
            m = c;
        }
        return m;
    }

    int sumTo(int n) {
        int s = 0;
        for (int i = 1; i <= n; i++) {
            s += i;
        }
        return s;
    }
}
