/* throughput benchmark fixture 2: scan */

void kernel_main_2(const int *in, int *out, int n) {
    int running = 0;
    for (int t = 0; t < n; t++) {
        out[t] = running;
        running += in[t];
    }
}
