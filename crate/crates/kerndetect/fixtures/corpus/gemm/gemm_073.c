/* matrix product fixture 73: tiled */

enum { TILE_73 = 32 };

void matmul_73(const double *a, const double *b, double *c, int n) {
    for (int ii = 0; ii < n; ii += TILE_73)
        for (int jj = 0; jj < n; jj += TILE_73)
            for (int kk = 0; kk < n; kk += TILE_73)
                for (int r = ii; r < ii + TILE_73 && r < n; r++)
                    for (int col = jj; col < jj + TILE_73 && col < n; col++) {
                        double acc = c[r * n + col];
                        for (int k = kk; k < kk + TILE_73 && k < n; k++)
                            acc += a[r * n + k] * b[k * n + col];
                        c[r * n + col] = acc;
                    }
}
