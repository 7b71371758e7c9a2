/* fourier transform fixture 6: dft */

#include <math.h>

void fft_6(const double *re_in, const double *im_in, double *re_out, double *im_out, int n) {
    for (int k = 0; k < n; k++) {
        double sum_re = 0.0, sum_im = 0.0;
        for (int t = 0; t < n; t++) {
            double angle = -2.0 * M_PI * k * t / n;
            sum_re += re_in[t] * cos(angle) - im_in[t] * sin(angle);
            sum_im += re_in[t] * sin(angle) + im_in[t] * cos(angle);
        }
        re_out[k] = sum_re;
        im_out[k] = sum_im;
    }
}
