// deep-learning layer fixture 2
#include <vector>

// BLAS-style helper: declared here, defined elsewhere in the framework
void caffe_cpu_gemm(int m, int n, int k, const float *a, const float *b, float *c);

class PoolingLayer_2 {
public:
    explicit PoolingLayer_2(int dim) : dim_(dim), weights_(dim * dim, 0.5f) {}

    void forward_cpu_2(const std::vector<float> &bottom, std::vector<float> &top) {
        top.resize(dim_);
        caffe_cpu_gemm(1, dim_, dim_, bottom.data(), weights_.data(), top.data());
        for (int t = 0; t < dim_; t++)
            top[t] = top[t] > 0.0f ? top[t] : 0.0f;
    }

private:
    int dim_;
    std::vector<float> weights_;
};
