#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bfr/rng.hpp"

namespace bfr {

enum class DType { f32, f64 };

inline const char* dtype_name(DType dt) { return dt == DType::f32 ? "f32" : "f64"; }

class Tensor;
struct TensorImpl;

/// One entry of the dynamically recorded computation graph. `backward`
/// maps the gradient of the output to gradients of each input (an
/// undefined Tensor marks an input that needs none).
struct GraphRecord {
    const char* op = "";
    std::vector<Tensor> inputs;
    std::function<std::vector<Tensor>(const Tensor& grad_out)> backward;
};

/// Dense row-major N-D array of f32 or f64 with optional gradient buffer
/// and graph linkage. Copying a Tensor copies the handle, not the data.
class Tensor {
public:
    Tensor() = default;

    static Tensor zeros(const std::vector<int64_t>& shape, DType dt = DType::f32);
    static Tensor ones(const std::vector<int64_t>& shape, DType dt = DType::f32);
    static Tensor full(const std::vector<int64_t>& shape, double value, DType dt = DType::f32);
    static Tensor scalar(double value, DType dt = DType::f32);
    static Tensor from_values(const std::vector<int64_t>& shape, const std::vector<double>& values,
                              DType dt = DType::f32);
    static Tensor randn(Rng& rng, const std::vector<int64_t>& shape, double std_dev = 1.0,
                        DType dt = DType::f32);
    static Tensor rand_uniform(Rng& rng, const std::vector<int64_t>& shape, double lo, double hi,
                               DType dt = DType::f32);

    bool defined() const { return impl_ != nullptr; }
    const std::vector<int64_t>& shape() const;
    int64_t dim() const;
    int64_t size(int64_t axis) const;  // negative axis counts from the end
    int64_t numel() const;
    DType dtype() const;

    bool requires_grad() const;
    Tensor& set_requires_grad(bool v);
    bool is_leaf() const;

    /// Gradient tensor (undefined until backward has populated it).
    Tensor grad() const;
    void zero_grad();
    /// Drops the gradient buffer entirely.
    void clear_grad();

    /// Graph record, null for leaves and no-grad results.
    const std::shared_ptr<GraphRecord>& node() const;

    // dtype-agnostic element access (flat row-major index)
    double value_at(int64_t i) const;
    void set_value_at(int64_t i, double v);
    /// Value of a one-element tensor.
    double item() const;

    float* f32_data();
    const float* f32_data() const;
    double* f64_data();
    const double* f64_data() const;

    std::vector<double> to_vector() const;

    /// Deep copy of the buffer; result is a leaf with requires_grad=false.
    Tensor clone() const;
    /// Same storage, detached from the graph.
    Tensor detach() const;
    /// Copy-cast to another dtype (leaf, no grad).
    Tensor to(DType dt) const;

    /// In-place elementwise add of same-shape tensor (no graph recording).
    void add_(const Tensor& other, double scale = 1.0);
    /// In-place fill.
    void fill_(double v);
    /// In-place copy of values from same-shape, same-dtype tensor.
    void copy_(const Tensor& other);

    TensorImpl* unsafe_impl() const { return impl_.get(); }

    // Internal: used by ops to attach graph records.
    void attach_node(std::shared_ptr<GraphRecord> rec);

private:
    explicit Tensor(std::shared_ptr<TensorImpl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<TensorImpl> impl_;
    friend struct TensorImpl;
    friend Tensor make_tensor(const std::vector<int64_t>&, DType);
    friend void backward(const Tensor&);
    friend Tensor wrap_impl(std::shared_ptr<TensorImpl>);
};

/// Allocates an uninitialized-to-zero tensor (internal helper for ops).
Tensor make_tensor(const std::vector<int64_t>& shape, DType dt);

int64_t shape_numel(const std::vector<int64_t>& shape);
std::string shape_str(const std::vector<int64_t>& shape);

/// Whether forward ops currently record the graph (thread-local).
bool grad_enabled();

/// RAII guard disabling graph recording in its scope.
class NoGradGuard {
public:
    NoGradGuard();
    ~NoGradGuard();
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;

private:
    bool prev_;
};

/// Reverse-mode sweep from a scalar loss. Populates .grad on every
/// requires_grad leaf reachable from it; repeated calls accumulate.
void backward(const Tensor& loss);

}  // namespace bfr
