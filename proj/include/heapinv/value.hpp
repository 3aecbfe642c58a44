#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "heapinv/ast.hpp"
#include "heapinv/integer.hpp"

namespace heapinv {

struct Address {
    std::uint64_t value = 0;  // 0 is null
    auto operator<=>(const Address&) const = default;
};

class Value;
struct ObjectData;

// Immutable object: (adt, ctor) indices into the program's ADT list plus
// field values. Encoders keep ADT and constructor order, so indices are
// comparable between a program and its encoding.
class Object {
public:
    Object(std::uint32_t adt, std::uint32_t ctor, std::vector<Value> fields);
    std::uint32_t adt() const;
    std::uint32_t ctor() const;
    const std::vector<Value>& fields() const;
    const ObjectData* data() const { return data_.get(); }

private:
    std::shared_ptr<const ObjectData> data_;
};

class Value {
public:
    Value() : v_(Integer(0)) {}
    Value(Integer i) : v_(std::move(i)) {}  // NOLINT
    Value(Address a) : v_(a) {}              // NOLINT
    Value(Object o) : v_(std::move(o)) {}    // NOLINT

    bool is_int() const { return std::holds_alternative<Integer>(v_); }
    bool is_addr() const { return std::holds_alternative<Address>(v_); }
    bool is_obj() const { return std::holds_alternative<Object>(v_); }
    const Integer& as_int() const { return std::get<Integer>(v_); }
    Address as_addr() const { return std::get<Address>(v_); }
    const Object& as_obj() const { return std::get<Object>(v_); }

    // Int and Addr values are compared by number; used when relating a
    // program to its encoding (where Addr became Int).
    bool numerically_equal(const Value& other) const;

    friend bool operator==(const Value& a, const Value& b);
    friend std::strong_ordering operator<=>(const Value& a, const Value& b);
    std::size_t hash() const;

private:
    std::variant<Integer, Address, Object> v_;
};

struct ObjectData {
    std::uint32_t adt;
    std::uint32_t ctor;
    std::vector<Value> fields;
};

using Tuple = std::vector<Value>;

struct TupleHash {
    std::size_t operator()(const Tuple& t) const;
};

std::strong_ordering compare_tuples(const Tuple& a, const Tuple& b);

// default value of a type: 0, null, or the ADT's default constructor with default fields
Value default_value(const ast::Program& p, const ast::TypeTag& t);
Value def_obj(const ast::Program& p);

std::string to_string(const ast::Program& p, const Value& v);
std::string to_string(const ast::Program& p, const Tuple& t);

}  // namespace heapinv
