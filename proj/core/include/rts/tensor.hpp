#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace rts {

using Shape = std::vector<int>;

inline std::int64_t numel(const Shape& shape) {
    std::int64_t n = 1;
    for (int e : shape) {
        if (e <= 0) throw std::invalid_argument("tensor extent must be positive");
        n *= e;
    }
    return n;
}

inline std::string shape_str(const Shape& shape) {
    std::string s = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) s += "x";
        s += std::to_string(shape[i]);
    }
    return s + "]";
}

/// Counts tensor-op kernel invocations; used to verify that the inference
/// path does the same amount of work regardless of how many training stages
/// produced the weights.
std::uint64_t tensor_op_count();
void reset_tensor_op_count();
void bump_tensor_op_count();

/// Dense N-d array, NCHW for 4-d. Data and grad buffers are shared so that
/// recorded backward rules keep them alive.
template <typename T>
struct Tensor {
    Shape shape;
    std::shared_ptr<std::vector<T>> data;
    std::shared_ptr<std::vector<T>> grad;  // non-null iff this node is tracked
    bool requires_grad = false;

    Tensor() = default;

    explicit Tensor(Shape s, bool req_grad = false)
        : shape(std::move(s)), requires_grad(req_grad) {
        data = std::make_shared<std::vector<T>>(static_cast<std::size_t>(numel(shape)), T(0));
        if (requires_grad) alloc_grad();
    }

    static Tensor from_data(Shape s, std::vector<T> values, bool req_grad = false) {
        if (static_cast<std::int64_t>(values.size()) != numel(s))
            throw std::invalid_argument("tensor data length does not match shape");
        Tensor t;
        t.shape = std::move(s);
        t.data = std::make_shared<std::vector<T>>(std::move(values));
        t.requires_grad = req_grad;
        if (req_grad) t.alloc_grad();
        return t;
    }

    static Tensor full(Shape s, T value) {
        Tensor t(std::move(s));
        std::fill(t.data->begin(), t.data->end(), value);
        return t;
    }

    void alloc_grad() {
        if (!grad) grad = std::make_shared<std::vector<T>>(data->size(), T(0));
    }

    void zero_grad() {
        if (grad) std::fill(grad->begin(), grad->end(), T(0));
    }

    std::int64_t size() const { return data ? static_cast<std::int64_t>(data->size()) : 0; }
    bool tracked() const { return static_cast<bool>(grad); }

    T* ptr() { return data->data(); }
    const T* ptr() const { return data->data(); }
    T* gptr() { return grad->data(); }
    const T* gptr() const { return grad->data(); }

    T item() const {
        if (size() != 1) throw std::invalid_argument("item() on non-scalar tensor");
        return (*data)[0];
    }
};

template <typename T>
void check_finite(const Tensor<T>& t, const char* what) {
    for (T v : *t.data)
        if (!std::isfinite(static_cast<double>(v)))
            throw std::runtime_error(std::string("non-finite value in ") + what);
}

/// Ordered record of backward rules. Replayed strictly in reverse; single
/// threaded by contract.
template <typename T>
class Tape {
public:
    void record(std::function<void()> fn) { ops_.push_back(std::move(fn)); }

    std::size_t size() const { return ops_.size(); }

    /// Seeds d(loss)/d(loss) = 1 and propagates through every recorded op in
    /// reverse order.
    void backward(Tensor<T>& loss) {
        if (loss.size() != 1) throw std::invalid_argument("backward expects a scalar loss");
        if (!loss.tracked()) throw std::invalid_argument("loss is not on the tape");
        (*loss.grad)[0] += T(1);
        replay();
    }

    /// Runs the recorded backward rules in reverse without seeding; callers
    /// set output grads themselves.
    void replay() {
        for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) (*it)();
    }

private:
    std::vector<std::function<void()>> ops_;
};

template <typename T>
Tensor<T> conv2d(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& bias,
                 int pad, Tape<T>* tape = nullptr);

template <typename T>
Tensor<T> relu(const Tensor<T>& input, Tape<T>* tape = nullptr);

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b, Tape<T>* tape = nullptr);

template <typename T>
Tensor<T> pixel_shuffle(const Tensor<T>& input, int r, Tape<T>* tape = nullptr);

template <typename T>
Tensor<T> pixel_unshuffle(const Tensor<T>& input, int r);

template <typename T>
Tensor<T> mse_loss(const Tensor<T>& pred, const Tensor<T>& target, Tape<T>* tape = nullptr);

// ---------------------------------------------------------------------------
// implementation

template <typename T>
Tensor<T> conv2d(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& bias,
                 int pad, Tape<T>* tape) {
    bump_tensor_op_count();
    if (input.shape.size() != 4) throw std::invalid_argument("conv2d: input must be NCHW");
    if (weight.shape.size() != 4) throw std::invalid_argument("conv2d: weight must be OCkk");
    if (bias.shape.size() != 1) throw std::invalid_argument("conv2d: bias must be 1-d");
    const int N = input.shape[0], C = input.shape[1], H = input.shape[2], W = input.shape[3];
    const int O = weight.shape[0], k = weight.shape[2];
    if (weight.shape[1] != C)
        throw std::invalid_argument("conv2d: weight channel extent " + std::to_string(weight.shape[1]) +
                                    " does not match input channels " + std::to_string(C));
    if (weight.shape[3] != k) throw std::invalid_argument("conv2d: kernel must be square");
    if (bias.shape[0] != O) throw std::invalid_argument("conv2d: bias extent must equal output channels");
    if (pad < 0) throw std::invalid_argument("conv2d: negative padding");
    const int OH = H + 2 * pad - k + 1;
    const int OW = W + 2 * pad - k + 1;
    if (OH <= 0 || OW <= 0) throw std::invalid_argument("conv2d: kernel larger than padded input");

    Tensor<T> out({N, O, OH, OW});
    const T* in = input.ptr();
    const T* w = weight.ptr();
    const T* b = bias.ptr();
    T* o = out.ptr();

    const std::int64_t in_cs = static_cast<std::int64_t>(H) * W;
    const std::int64_t out_cs = static_cast<std::int64_t>(OH) * OW;

    for (int n = 0; n < N; ++n) {
        for (int oc = 0; oc < O; ++oc) {
            T* op = o + (static_cast<std::int64_t>(n) * O + oc) * out_cs;
            std::fill(op, op + out_cs, b[oc]);
            for (int c = 0; c < C; ++c) {
                const T* ip = in + (static_cast<std::int64_t>(n) * C + c) * in_cs;
                const T* wp = w + ((static_cast<std::int64_t>(oc) * C + c) * k) * k;
                for (int ky = 0; ky < k; ++ky) {
                    for (int kx = 0; kx < k; ++kx) {
                        const T wv = wp[ky * k + kx];
                        if (wv == T(0)) continue;
                        const int oy0 = std::max(0, pad - ky);
                        const int oy1 = std::min(OH, H + pad - ky);
                        const int ox0 = std::max(0, pad - kx);
                        const int ox1 = std::min(OW, W + pad - kx);
                        for (int oy = oy0; oy < oy1; ++oy) {
                            const T* irow = ip + static_cast<std::int64_t>(oy + ky - pad) * W + (kx - pad);
                            T* orow = op + static_cast<std::int64_t>(oy) * OW;
                            for (int ox = ox0; ox < ox1; ++ox) orow[ox] += wv * irow[ox];
                        }
                    }
                }
            }
        }
    }
    check_finite(out, "conv2d output");

    const bool track = tape && (input.tracked() || weight.tracked() || bias.tracked());
    if (track) {
        out.alloc_grad();
        Tensor<T> in_t = input, w_t = weight, b_t = bias, out_t = out;
        tape->record([in_t, w_t, b_t, out_t, pad]() mutable {
            const int N = in_t.shape[0], C = in_t.shape[1], H = in_t.shape[2], W = in_t.shape[3];
            const int O = w_t.shape[0], k = w_t.shape[2];
            const int OH = out_t.shape[2], OW = out_t.shape[3];
            const std::int64_t in_cs = static_cast<std::int64_t>(H) * W;
            const std::int64_t out_cs = static_cast<std::int64_t>(OH) * OW;
            const T* go = out_t.gptr();
            if (in_t.tracked()) {
                T* gi = in_t.gptr();
                const T* w = w_t.ptr();
                for (int n = 0; n < N; ++n)
                    for (int c = 0; c < C; ++c) {
                        T* gip = gi + (static_cast<std::int64_t>(n) * C + c) * in_cs;
                        for (int oc = 0; oc < O; ++oc) {
                            const T* gop = go + (static_cast<std::int64_t>(n) * O + oc) * out_cs;
                            const T* wp = w + ((static_cast<std::int64_t>(oc) * C + c) * k) * k;
                            for (int ky = 0; ky < k; ++ky)
                                for (int kx = 0; kx < k; ++kx) {
                                    const T wv = wp[ky * k + kx];
                                    if (wv == T(0)) continue;
                                    const int oy0 = std::max(0, pad - ky);
                                    const int oy1 = std::min(OH, H + pad - ky);
                                    const int ox0 = std::max(0, pad - kx);
                                    const int ox1 = std::min(OW, W + pad - kx);
                                    for (int oy = oy0; oy < oy1; ++oy) {
                                        T* girow = gip + static_cast<std::int64_t>(oy + ky - pad) * W + (kx - pad);
                                        const T* gorow = gop + static_cast<std::int64_t>(oy) * OW;
                                        for (int ox = ox0; ox < ox1; ++ox) girow[ox] += wv * gorow[ox];
                                    }
                                }
                        }
                    }
            }
            if (w_t.tracked()) {
                T* gw = w_t.gptr();
                const T* in = in_t.ptr();
                for (int oc = 0; oc < O; ++oc)
                    for (int c = 0; c < C; ++c)
                        for (int ky = 0; ky < k; ++ky)
                            for (int kx = 0; kx < k; ++kx) {
                                T acc = T(0);
                                const int oy0 = std::max(0, pad - ky);
                                const int oy1 = std::min(OH, H + pad - ky);
                                const int ox0 = std::max(0, pad - kx);
                                const int ox1 = std::min(OW, W + pad - kx);
                                for (int n = 0; n < N; ++n) {
                                    const T* gop = go + (static_cast<std::int64_t>(n) * O + oc) * out_cs;
                                    const T* ip = in + (static_cast<std::int64_t>(n) * C + c) * in_cs;
                                    for (int oy = oy0; oy < oy1; ++oy) {
                                        const T* irow = ip + static_cast<std::int64_t>(oy + ky - pad) * W + (kx - pad);
                                        const T* gorow = gop + static_cast<std::int64_t>(oy) * OW;
                                        for (int ox = ox0; ox < ox1; ++ox) acc += gorow[ox] * irow[ox];
                                    }
                                }
                                gw[((static_cast<std::int64_t>(oc) * C + c) * k + ky) * k + kx] += acc;
                            }
            }
            if (b_t.tracked()) {
                T* gb = b_t.gptr();
                for (int oc = 0; oc < O; ++oc) {
                    T acc = T(0);
                    for (int n = 0; n < N; ++n) {
                        const T* gop = go + (static_cast<std::int64_t>(n) * O + oc) * out_cs;
                        for (std::int64_t i = 0; i < out_cs; ++i) acc += gop[i];
                    }
                    gb[oc] += acc;
                }
            }
        });
    }
    return out;
}

template <typename T>
Tensor<T> relu(const Tensor<T>& input, Tape<T>* tape) {
    bump_tensor_op_count();
    Tensor<T> out(input.shape);
    const T* in = input.ptr();
    T* o = out.ptr();
    const std::int64_t n = input.size();
    for (std::int64_t i = 0; i < n; ++i) o[i] = in[i] > T(0) ? in[i] : T(0);

    if (tape && input.tracked()) {
        out.alloc_grad();
        Tensor<T> in_t = input, out_t = out;
        tape->record([in_t, out_t]() mutable {
            const T* in = in_t.ptr();
            const T* go = out_t.gptr();
            T* gi = in_t.gptr();
            const std::int64_t n = in_t.size();
            for (std::int64_t i = 0; i < n; ++i)
                if (in[i] > T(0)) gi[i] += go[i];
        });
    }
    return out;
}

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b, Tape<T>* tape) {
    bump_tensor_op_count();
    if (a.shape != b.shape) throw std::invalid_argument("add: shape mismatch " + shape_str(a.shape) + " vs " + shape_str(b.shape));
    Tensor<T> out(a.shape);
    const T* pa = a.ptr();
    const T* pb = b.ptr();
    T* o = out.ptr();
    const std::int64_t n = a.size();
    for (std::int64_t i = 0; i < n; ++i) o[i] = pa[i] + pb[i];

    if (tape && (a.tracked() || b.tracked())) {
        out.alloc_grad();
        Tensor<T> a_t = a, b_t = b, out_t = out;
        tape->record([a_t, b_t, out_t]() mutable {
            const T* go = out_t.gptr();
            const std::int64_t n = out_t.size();
            if (a_t.tracked()) {
                T* g = a_t.gptr();
                for (std::int64_t i = 0; i < n; ++i) g[i] += go[i];
            }
            if (b_t.tracked()) {
                T* g = b_t.gptr();
                for (std::int64_t i = 0; i < n; ++i) g[i] += go[i];
            }
        });
    }
    return out;
}

namespace detail {

// out[n][c][r*i+di][r*j+dj] = in[n][c*r*r + di*r + dj][i][j]
template <typename T>
void shuffle_copy(const T* in, T* out, int N, int Cout, int H, int W, int r) {
    for (int n = 0; n < N; ++n)
        for (int c = 0; c < Cout; ++c)
            for (int di = 0; di < r; ++di)
                for (int dj = 0; dj < r; ++dj) {
                    const T* ip = in + ((static_cast<std::int64_t>(n) * Cout * r * r) +
                                        (static_cast<std::int64_t>(c) * r * r + di * r + dj)) * H * W;
                    for (int i = 0; i < H; ++i) {
                        T* orow = out + ((static_cast<std::int64_t>(n) * Cout + c) *
                                             (static_cast<std::int64_t>(H) * r) + (static_cast<std::int64_t>(r) * i + di)) *
                                            (static_cast<std::int64_t>(W) * r) + dj;
                        const T* irow = ip + static_cast<std::int64_t>(i) * W;
                        for (int j = 0; j < W; ++j) orow[static_cast<std::int64_t>(j) * r] = irow[j];
                    }
                }
}

template <typename T>
void unshuffle_accum(const T* up, T* down, int N, int Cout, int H, int W, int r) {
    for (int n = 0; n < N; ++n)
        for (int c = 0; c < Cout; ++c)
            for (int di = 0; di < r; ++di)
                for (int dj = 0; dj < r; ++dj) {
                    T* dp = down + ((static_cast<std::int64_t>(n) * Cout * r * r) +
                                    (static_cast<std::int64_t>(c) * r * r + di * r + dj)) * H * W;
                    for (int i = 0; i < H; ++i) {
                        const T* urow = up + ((static_cast<std::int64_t>(n) * Cout + c) *
                                                  (static_cast<std::int64_t>(H) * r) + (static_cast<std::int64_t>(r) * i + di)) *
                                                 (static_cast<std::int64_t>(W) * r) + dj;
                        T* drow = dp + static_cast<std::int64_t>(i) * W;
                        for (int j = 0; j < W; ++j) drow[j] += urow[static_cast<std::int64_t>(j) * r];
                    }
                }
}

}  // namespace detail

template <typename T>
Tensor<T> pixel_shuffle(const Tensor<T>& input, int r, Tape<T>* tape) {
    bump_tensor_op_count();
    if (input.shape.size() != 4) throw std::invalid_argument("pixel_shuffle: input must be NCHW");
    if (r < 1) throw std::invalid_argument("pixel_shuffle: r must be >= 1");
    const int N = input.shape[0], C = input.shape[1], H = input.shape[2], W = input.shape[3];
    if (C % (r * r) != 0)
        throw std::invalid_argument("pixel_shuffle: channel extent " + std::to_string(C) +
                                    " not divisible by r^2 = " + std::to_string(r * r));
    const int Cout = C / (r * r);
    Tensor<T> out({N, Cout, H * r, W * r});
    detail::shuffle_copy(input.ptr(), out.ptr(), N, Cout, H, W, r);

    if (tape && input.tracked()) {
        out.alloc_grad();
        Tensor<T> in_t = input, out_t = out;
        tape->record([in_t, out_t, r, N, Cout, H, W]() mutable {
            detail::unshuffle_accum(out_t.gptr(), in_t.gptr(), N, Cout, H, W, r);
        });
    }
    return out;
}

template <typename T>
Tensor<T> pixel_unshuffle(const Tensor<T>& input, int r) {
    bump_tensor_op_count();
    if (input.shape.size() != 4) throw std::invalid_argument("pixel_unshuffle: input must be NCHW");
    const int N = input.shape[0], C = input.shape[1], H = input.shape[2], W = input.shape[3];
    if (H % r != 0 || W % r != 0)
        throw std::invalid_argument("pixel_unshuffle: spatial extents not divisible by r");
    Tensor<T> out({N, C * r * r, H / r, W / r});
    detail::unshuffle_accum(input.ptr(), out.ptr(), N, C, H / r, W / r, r);
    return out;
}

template <typename T>
Tensor<T> mse_loss(const Tensor<T>& pred, const Tensor<T>& target, Tape<T>* tape) {
    bump_tensor_op_count();
    if (pred.shape != target.shape)
        throw std::invalid_argument("mse_loss: shape mismatch " + shape_str(pred.shape) + " vs " + shape_str(target.shape));
    const std::int64_t n = pred.size();
    const T* p = pred.ptr();
    const T* t = target.ptr();
    T acc = T(0);
    for (std::int64_t i = 0; i < n; ++i) {
        const T d = p[i] - t[i];
        acc += d * d;
    }
    Tensor<T> out = Tensor<T>::from_data({1}, {acc / static_cast<T>(n)});

    if (tape && pred.tracked()) {
        out.alloc_grad();
        Tensor<T> p_t = pred, t_t = target, out_t = out;
        tape->record([p_t, t_t, out_t, n]() mutable {
            const T g = (*out_t.grad)[0] * T(2) / static_cast<T>(n);
            const T* p = p_t.ptr();
            const T* t = t_t.ptr();
            T* gp = p_t.gptr();
            for (std::int64_t i = 0; i < n; ++i) gp[i] += g * (p[i] - t[i]);
        });
    }
    return out;
}

}  // namespace rts
