#include <rvsdg/error.hpp>
#include <rvsdg/type.hpp>

namespace rvsdg
{

bool
FunctionSignature::operator==(const FunctionSignature & other) const
{
  return parameters == other.parameters && results == other.results;
}

bool
Type::valid_integer_width(unsigned width) noexcept
{
  return width == 1 || width == 8 || width == 16 || width == 32 || width == 64;
}

Type
Type::integer(unsigned width)
{
  if (!valid_integer_width(width))
    throw GraphError("invalid integer width " + std::to_string(width));
  return { TypeKind::Integer, width };
}

Type
Type::float64()
{
  return { TypeKind::Float, 64 };
}

Type
Type::pointer()
{
  return { TypeKind::Pointer, 64 };
}

Type
Type::control(unsigned alternatives)
{
  if (alternatives < 1)
    throw GraphError("control type needs at least one alternative");
  return { TypeKind::Control, alternatives };
}

Type
Type::memory_state()
{
  return { TypeKind::MemoryState, 0 };
}

Type
Type::io_state()
{
  return { TypeKind::IoState, 0 };
}

Type
Type::function(std::vector<Type> parameters, std::vector<Type> results)
{
  return function(FunctionSignature{ std::move(parameters), std::move(results) });
}

Type
Type::function(FunctionSignature signature)
{
  Type type(TypeKind::Function, 0);
  type.signature_ = std::make_shared<const FunctionSignature>(std::move(signature));
  return type;
}

Type
Type::selector_for(unsigned alternatives)
{
  if (alternatives <= 2)
    return integer(1);
  if (alternatives <= (1u << 8))
    return integer(8);
  if (alternatives <= (1u << 16))
    return integer(16);
  return integer(32);
}

const FunctionSignature &
Type::signature() const
{
  if (kind_ != TypeKind::Function)
    throw GraphError("type " + str() + " has no signature");
  return *signature_;
}

bool
Type::operator==(const Type & other) const
{
  if (kind_ != other.kind_ || param_ != other.param_)
    return false;
  if (kind_ != TypeKind::Function)
    return true;
  return signature_ == other.signature_ || *signature_ == *other.signature_;
}

std::string
Type::str() const
{
  switch (kind_)
  {
  case TypeKind::Integer:
    return "i" + std::to_string(param_);
  case TypeKind::Float:
    return "f64";
  case TypeKind::Pointer:
    return "ptr";
  case TypeKind::Control:
    return "ctl(" + std::to_string(param_) + ")";
  case TypeKind::MemoryState:
    return "mem";
  case TypeKind::IoState:
    return "io";
  case TypeKind::Function:
  {
    std::string s = "fn(";
    for (std::size_t n = 0; n < signature_->parameters.size(); n++)
    {
      if (n != 0)
        s += ", ";
      s += signature_->parameters[n].str();
    }
    s += ") -> ";
    if (signature_->results.empty())
      s += "void";
    else
      s += signature_->results[0].str();
    return s;
  }
  }
  return "?";
}

}
