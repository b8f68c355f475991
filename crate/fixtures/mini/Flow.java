class Flow {
    int find(int[] xs, int key) {
        int at = -1;
        for (int i = 0; i < xs.length; i++) {
            if (xs[i] == key) {
                at = i;
                break;
            }
        }
        return at;
    }

    int firstNegative(int[] xs) {
        for (int i = 0; i < xs.length; i++) {
            if (xs[i] < 0) {
                return i;
            }
        }
        return -1;
    }

    int classify(int code) {
        int r;
        switch (code) {
            case 1:
                r = 10;
                break;
            case 2:
            case 3:
                r = 20;
                break;
            default:
                r = 0;
        }
        return r;
    }

    int nested(int n) {
        int c = 0;
        while (n > 0) {
            if (n % 2 == 0 && n > 10) {
                c++;
            } else {
                c--;
            }
            n--;
        }
        return c;
    }

    int search(int[][] grid, int key) {
        int hits = 0;
        outer:
        for (int i = 0; i < grid.length; i++) {
            for (int j = 0; j < grid[i].length; j++) {
                if (grid[i][j] == key) {
                    hits++;
                    continue outer;
                }
            }
        }
        return hits;
    }
}
