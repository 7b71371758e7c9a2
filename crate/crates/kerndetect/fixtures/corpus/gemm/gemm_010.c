/* matrix product fixture 10: tiled */

enum { TILE_10 = 32 };

void matmul_10(const double *a, const double *b, double *c, int n) {
    for (int ii = 0; ii < n; ii += TILE_10)
        for (int jj = 0; jj < n; jj += TILE_10)
            for (int kk = 0; kk < n; kk += TILE_10)
                for (int r = ii; r < ii + TILE_10 && r < n; r++)
                    for (int col = jj; col < jj + TILE_10 && col < n; col++) {
                        double acc = c[r * n + col];
                        for (int k = kk; k < kk + TILE_10 && k < n; k++)
                            acc += a[r * n + k] * b[k * n + col];
                        c[r * n + col] = acc;
                    }
}
