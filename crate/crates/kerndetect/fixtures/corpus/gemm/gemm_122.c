/* matrix product fixture 122: tiled */

enum { TILE_122 = 32 };

void matmul_122(const double *a, const double *b, double *c, int n) {
    for (int ii = 0; ii < n; ii += TILE_122)
        for (int jj = 0; jj < n; jj += TILE_122)
            for (int kk = 0; kk < n; kk += TILE_122)
                for (int r = ii; r < ii + TILE_122 && r < n; r++)
                    for (int col = jj; col < jj + TILE_122 && col < n; col++) {
                        double acc = c[r * n + col];
                        for (int k = kk; k < kk + TILE_122 && k < n; k++)
                            acc += a[r * n + k] * b[k * n + col];
                        c[r * n + col] = acc;
                    }
}
