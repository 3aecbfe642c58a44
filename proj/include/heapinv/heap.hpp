#pragma once

#include <utility>
#include <vector>

#include "heapinv/value.hpp"

namespace heapinv {

// Sequence of objects; address a denotes element a-1, null is 0.
class Heap {
public:
    explicit Heap(Value def_obj) : def_(std::move(def_obj)) {}

    Address allocate(Value o) {
        objects_.push_back(std::move(o));
        return Address{objects_.size()};
    }
    bool valid(Address a) const { return a.value > 0 && a.value <= objects_.size(); }
    const Value& read(Address a) const { return valid(a) ? objects_[a.value - 1] : def_; }
    void write(Address a, Value o) {
        if (valid(a))
            objects_[a.value - 1] = std::move(o);
    }
    std::size_t size() const { return objects_.size(); }
    const std::vector<Value>& objects() const { return objects_; }
    const Value& default_object() const { return def_; }

    friend bool operator==(const Heap& a, const Heap& b) { return a.objects_ == b.objects_ && a.def_ == b.def_; }

private:
    std::vector<Value> objects_;
    Value def_;
};

// value-returning forms of the three heap operations
inline std::pair<Heap, Address> heap_allocate(Heap h, Value o) {
    Address a = h.allocate(std::move(o));
    return {std::move(h), a};
}
inline Value heap_read(const Heap& h, Address a) { return h.read(a); }
inline Heap heap_write(Heap h, Address a, Value o) {
    h.write(a, std::move(o));
    return h;
}

// Chronological log of (address, object) pairs; reads scan backwards.
class TraceHeap {
public:
    explicit TraceHeap(Value def_obj) : def_(std::move(def_obj)) {}

    Address allocate(Value o) {
        Address a{++allocs_};
        trace_.emplace_back(a, std::move(o));
        return a;
    }
    bool valid(Address a) const { return a.value > 0 && a.value <= allocs_; }
    const Value& read(Address a) const {
        if (!valid(a))
            return def_;
        for (auto it = trace_.rbegin(); it != trace_.rend(); ++it)
            if (it->first == a)
                return it->second;
        return def_;
    }
    void write(Address a, Value o) { trace_.emplace_back(a, std::move(o)); }
    std::size_t size() const { return allocs_; }
    const std::vector<std::pair<Address, Value>>& trace() const { return trace_; }
    const Value& default_object() const { return def_; }

private:
    std::vector<std::pair<Address, Value>> trace_;
    std::uint64_t allocs_ = 0;
    Value def_;
};

}  // namespace heapinv
