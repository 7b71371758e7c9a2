/* throughput benchmark fixture 1: histogram */

void kernel_main_1(const unsigned char *pixels, unsigned *bins, int n) {
    for (int t = 0; t < 256; t++)
        bins[t] = 0;
    for (int t = 0; t < n; t++)
        bins[pixels[t]]++;
}
