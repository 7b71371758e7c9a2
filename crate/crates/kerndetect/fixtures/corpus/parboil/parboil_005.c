/* throughput benchmark fixture 5: matvec */

void kernel_main_5(const float *m, const float *v, float *out, int rows, int cols) {
    for (int r = 0; r < rows; r++) {
        float acc = 0.0f;
        for (int c = 0; c < cols; c++)
            acc += m[r * cols + c] * v[c];
        out[r] = acc;
    }
}
