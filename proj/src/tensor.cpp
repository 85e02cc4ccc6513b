#include "bfr/tensor.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "bfr/errors.hpp"

namespace bfr {

struct TensorImpl {
    std::vector<int64_t> shape;
    DType dtype = DType::f32;
    std::vector<float> f32;
    std::vector<double> f64;
    bool requires_grad = false;
    std::shared_ptr<TensorImpl> grad;
    std::shared_ptr<GraphRecord> node;

    int64_t numel() const { return shape_numel(shape); }
};

int64_t shape_numel(const std::vector<int64_t>& shape) {
    int64_t n = 1;
    for (int64_t d : shape) n *= d;
    return n;
}

std::string shape_str(const std::vector<int64_t>& shape) {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
    os << "]";
    return os.str();
}

Tensor wrap_impl(std::shared_ptr<TensorImpl> impl) { return Tensor(std::move(impl)); }

Tensor make_tensor(const std::vector<int64_t>& shape, DType dt) {
    for (int64_t d : shape)
        if (d <= 0) throw DimensionError("tensor extents must be positive, got " + shape_str(shape));
    auto impl = std::make_shared<TensorImpl>();
    impl->shape = shape;
    impl->dtype = dt;
    const int64_t n = shape_numel(shape);
    if (dt == DType::f32)
        impl->f32.assign(static_cast<size_t>(n), 0.0f);
    else
        impl->f64.assign(static_cast<size_t>(n), 0.0);
    return wrap_impl(std::move(impl));
}

Tensor Tensor::zeros(const std::vector<int64_t>& shape, DType dt) { return make_tensor(shape, dt); }

Tensor Tensor::ones(const std::vector<int64_t>& shape, DType dt) { return full(shape, 1.0, dt); }

Tensor Tensor::full(const std::vector<int64_t>& shape, double value, DType dt) {
    Tensor t = make_tensor(shape, dt);
    t.fill_(value);
    return t;
}

Tensor Tensor::scalar(double value, DType dt) { return full({1}, value, dt); }

Tensor Tensor::from_values(const std::vector<int64_t>& shape, const std::vector<double>& values,
                           DType dt) {
    Tensor t = make_tensor(shape, dt);
    if (static_cast<int64_t>(values.size()) != t.numel())
        throw DimensionError("from_values: " + std::to_string(values.size()) +
                             " values for shape " + shape_str(shape));
    for (int64_t i = 0; i < t.numel(); ++i) t.set_value_at(i, values[static_cast<size_t>(i)]);
    return t;
}

Tensor Tensor::randn(Rng& rng, const std::vector<int64_t>& shape, double std_dev, DType dt) {
    Tensor t = make_tensor(shape, dt);
    for (int64_t i = 0; i < t.numel(); ++i) t.set_value_at(i, rng.normal() * std_dev);
    return t;
}

Tensor Tensor::rand_uniform(Rng& rng, const std::vector<int64_t>& shape, double lo, double hi,
                            DType dt) {
    Tensor t = make_tensor(shape, dt);
    for (int64_t i = 0; i < t.numel(); ++i) t.set_value_at(i, rng.uniform(lo, hi));
    return t;
}

static const std::vector<int64_t> kEmptyShape;

const std::vector<int64_t>& Tensor::shape() const {
    return impl_ ? impl_->shape : kEmptyShape;
}

int64_t Tensor::dim() const { return impl_ ? static_cast<int64_t>(impl_->shape.size()) : 0; }

int64_t Tensor::size(int64_t axis) const {
    const int64_t d = dim();
    if (axis < 0) axis += d;
    if (axis < 0 || axis >= d) throw DimensionError("size: axis out of range");
    return impl_->shape[static_cast<size_t>(axis)];
}

int64_t Tensor::numel() const { return impl_ ? impl_->numel() : 0; }

DType Tensor::dtype() const { return impl_ ? impl_->dtype : DType::f32; }

bool Tensor::requires_grad() const { return impl_ && impl_->requires_grad; }

Tensor& Tensor::set_requires_grad(bool v) {
    if (!impl_) throw UsageError("set_requires_grad on undefined tensor");
    if (impl_->node && v == false) {
        // detaching a recorded intermediate is done via detach()
        throw UsageError("cannot clear requires_grad on a non-leaf tensor");
    }
    impl_->requires_grad = v;
    if (!v) impl_->grad.reset();
    return *this;
}

bool Tensor::is_leaf() const { return impl_ && !impl_->node; }

Tensor Tensor::grad() const {
    if (!impl_ || !impl_->grad) return Tensor();
    return wrap_impl(impl_->grad);
}

void Tensor::zero_grad() {
    if (impl_ && impl_->grad) wrap_impl(impl_->grad).fill_(0.0);
}

void Tensor::clear_grad() {
    if (impl_) impl_->grad.reset();
}

const std::shared_ptr<GraphRecord>& Tensor::node() const {
    static const std::shared_ptr<GraphRecord> null_node;
    return impl_ ? impl_->node : null_node;
}

double Tensor::value_at(int64_t i) const {
    return impl_->dtype == DType::f32 ? static_cast<double>(impl_->f32[static_cast<size_t>(i)])
                                      : impl_->f64[static_cast<size_t>(i)];
}

void Tensor::set_value_at(int64_t i, double v) {
    if (impl_->dtype == DType::f32)
        impl_->f32[static_cast<size_t>(i)] = static_cast<float>(v);
    else
        impl_->f64[static_cast<size_t>(i)] = v;
}

double Tensor::item() const {
    if (numel() != 1) throw UsageError("item() on tensor with " + std::to_string(numel()) + " elements");
    return value_at(0);
}

float* Tensor::f32_data() { return impl_->f32.data(); }
const float* Tensor::f32_data() const { return impl_->f32.data(); }
double* Tensor::f64_data() { return impl_->f64.data(); }
const double* Tensor::f64_data() const { return impl_->f64.data(); }

std::vector<double> Tensor::to_vector() const {
    std::vector<double> out(static_cast<size_t>(numel()));
    for (int64_t i = 0; i < numel(); ++i) out[static_cast<size_t>(i)] = value_at(i);
    return out;
}

Tensor Tensor::clone() const {
    Tensor t = make_tensor(shape(), dtype());
    t.copy_(*this);
    return t;
}

Tensor Tensor::detach() const {
    if (!impl_) return Tensor();
    auto impl = std::make_shared<TensorImpl>();
    impl->shape = impl_->shape;
    impl->dtype = impl_->dtype;
    impl->f32 = impl_->f32;  // value copy; detached views are not aliased
    impl->f64 = impl_->f64;
    return wrap_impl(std::move(impl));
}

Tensor Tensor::to(DType dt) const {
    Tensor t = make_tensor(shape(), dt);
    for (int64_t i = 0; i < numel(); ++i) t.set_value_at(i, value_at(i));
    return t;
}

void Tensor::add_(const Tensor& other, double scale) {
    if (shape() != other.shape()) throw DimensionError("add_: shape mismatch");
    if (dtype() != other.dtype()) throw DimensionError("add_: dtype mismatch");
    const int64_t n = numel();
    if (dtype() == DType::f32) {
        float* a = f32_data();
        const float* b = other.f32_data();
        const float s = static_cast<float>(scale);
        for (int64_t i = 0; i < n; ++i) a[i] += s * b[i];
    } else {
        double* a = f64_data();
        const double* b = other.f64_data();
        for (int64_t i = 0; i < n; ++i) a[i] += scale * b[i];
    }
}

void Tensor::fill_(double v) {
    if (dtype() == DType::f32)
        std::fill(impl_->f32.begin(), impl_->f32.end(), static_cast<float>(v));
    else
        std::fill(impl_->f64.begin(), impl_->f64.end(), v);
}

void Tensor::copy_(const Tensor& other) {
    if (shape() != other.shape() || dtype() != other.dtype())
        throw DimensionError("copy_: shape/dtype mismatch");
    impl_->f32 = other.impl_->f32;
    impl_->f64 = other.impl_->f64;
}

void Tensor::attach_node(std::shared_ptr<GraphRecord> rec) {
    impl_->node = std::move(rec);
    impl_->requires_grad = true;
}

namespace {
thread_local bool g_grad_enabled = true;
}

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : prev_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = prev_; }

void backward(const Tensor& loss) {
    if (!loss.defined() || loss.numel() != 1) throw UsageError("backward: loss must be a scalar tensor");
    if (!loss.node() && !loss.requires_grad())
        throw UsageError("backward: loss is not connected to a recorded graph");

    NoGradGuard ng;

    // Reverse topological order over graph records (iterative DFS).
    std::vector<TensorImpl*> topo;
    std::unordered_set<TensorImpl*> visited;
    std::vector<std::pair<TensorImpl*, size_t>> stack;
    stack.emplace_back(loss.unsafe_impl(), 0);
    visited.insert(loss.unsafe_impl());
    while (!stack.empty()) {
        auto& [impl, idx] = stack.back();
        if (!impl->node || idx >= impl->node->inputs.size()) {
            topo.push_back(impl);
            stack.pop_back();
            continue;
        }
        const Tensor& in = impl->node->inputs[idx++];
        if (in.defined() && in.node() && !visited.count(in.unsafe_impl())) {
            visited.insert(in.unsafe_impl());
            stack.emplace_back(in.unsafe_impl(), 0);
        }
    }

    std::unordered_map<TensorImpl*, Tensor> gmap;
    gmap[loss.unsafe_impl()] = Tensor::ones(loss.shape(), loss.dtype());

    auto accumulate_leaf = [](const Tensor& leaf, const Tensor& g) {
        TensorImpl* impl = leaf.unsafe_impl();
        if (!impl->grad) {
            auto buf = std::make_shared<TensorImpl>();
            buf->shape = impl->shape;
            buf->dtype = impl->dtype;
            if (buf->dtype == DType::f32)
                buf->f32.assign(static_cast<size_t>(impl->numel()), 0.0f);
            else
                buf->f64.assign(static_cast<size_t>(impl->numel()), 0.0);
            impl->grad = std::move(buf);
        }
        wrap_impl(impl->grad).add_(g);
    };

    // Leaves reached directly (loss itself may be a leaf).
    if (!loss.node() && loss.requires_grad()) {
        accumulate_leaf(loss, gmap[loss.unsafe_impl()]);
        return;
    }

    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
        TensorImpl* impl = *it;
        if (!impl->node) continue;
        auto git = gmap.find(impl);
        if (git == gmap.end()) continue;  // branch that does not reach the loss
        const Tensor gout = git->second;
        std::vector<Tensor> gins = impl->node->backward(gout);
        if (gins.size() != impl->node->inputs.size())
            throw UsageError(std::string("backward rule of ") + impl->node->op +
                             " returned wrong number of gradients");
        for (size_t i = 0; i < gins.size(); ++i) {
            const Tensor& in = impl->node->inputs[i];
            if (!in.defined() || !gins[i].defined()) continue;
            if (!in.requires_grad()) continue;
            if (gins[i].shape() != in.shape())
                throw DimensionError(std::string("backward rule of ") + impl->node->op +
                                     " produced gradient of shape " + shape_str(gins[i].shape()) +
                                     " for input of shape " + shape_str(in.shape()));
            if (in.node()) {
                auto [slot, inserted] = gmap.try_emplace(in.unsafe_impl(), Tensor());
                if (inserted)
                    slot->second = gins[i].clone();
                else
                    slot->second.add_(gins[i]);
            } else {
                accumulate_leaf(in, gins[i]);
            }
        }
        gmap.erase(impl);
    }
}

}  // namespace bfr
