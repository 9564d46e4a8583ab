#ifndef RVSDG_TYPE_HPP
#define RVSDG_TYPE_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace rvsdg
{

enum class TypeKind : std::uint8_t
{
  Integer,
  Float,
  Pointer,
  Function,
  Control,
  MemoryState,
  IoState
};

class Type;

struct FunctionSignature
{
  std::vector<Type> parameters;
  std::vector<Type> results;

  bool
  operator==(const FunctionSignature & other) const;
};

/**
 * Port type of the graph. Integer widths are restricted to 1, 8, 16, 32 and 64 bits, control
 * types carry their alternative count, and function types share their signature.
 *
 * Memory and io states are the two state kinds; every other kind is a value kind.
 */
class Type
{
public:
  Type() = default;

  static Type
  integer(unsigned width);

  static Type
  float64();

  static Type
  pointer();

  static Type
  control(unsigned alternatives);

  static Type
  memory_state();

  static Type
  io_state();

  static Type
  function(std::vector<Type> parameters, std::vector<Type> results);

  static Type
  function(FunctionSignature signature);

  /// Narrowest integer type able to hold every index in [0, alternatives).
  static Type
  selector_for(unsigned alternatives);

  static bool
  valid_integer_width(unsigned width) noexcept;

  [[nodiscard]] TypeKind
  kind() const noexcept
  {
    return kind_;
  }

  [[nodiscard]] unsigned
  width() const noexcept
  {
    return kind_ == TypeKind::Integer ? param_ : 0;
  }

  [[nodiscard]] unsigned
  alternatives() const noexcept
  {
    return kind_ == TypeKind::Control ? param_ : 0;
  }

  [[nodiscard]] const FunctionSignature &
  signature() const;

  [[nodiscard]] bool
  is_state() const noexcept
  {
    return kind_ == TypeKind::MemoryState || kind_ == TypeKind::IoState;
  }

  [[nodiscard]] bool
  is_value() const noexcept
  {
    return !is_state();
  }

  [[nodiscard]] bool
  is_integer() const noexcept
  {
    return kind_ == TypeKind::Integer;
  }

  [[nodiscard]] bool
  is_control() const noexcept
  {
    return kind_ == TypeKind::Control;
  }

  [[nodiscard]] bool
  is_function() const noexcept
  {
    return kind_ == TypeKind::Function;
  }

  /// Canonical spelling, e.g. "i64", "ctl(3)", "fn(i64, ptr) -> i64".
  [[nodiscard]] std::string
  str() const;

  bool
  operator==(const Type & other) const;

  bool
  operator!=(const Type & other) const
  {
    return !(*this == other);
  }

private:
  Type(TypeKind kind, unsigned param) noexcept
      : kind_(kind),
        param_(param)
  {}

  TypeKind kind_ = TypeKind::Integer;
  unsigned param_ = 64;
  std::shared_ptr<const FunctionSignature> signature_;
};

}

#endif
