#ifndef WINOREG_ERROR_HPP
#define WINOREG_ERROR_HPP

#include <stdexcept>
#include <string>

namespace winoreg {

// Error categories; the CLI maps each category to its own exit code.
enum class ErrorCode : int {
    parse_error = 3,
    validation_error = 4,
    io_error = 5,
    config_error = 6,
    format_error = 7,      // malformed model/resource container
    version_error = 8,     // container version mismatch
    cache_miss_offline = 9,
    network_error = 10,
    dimension_error = 11,
    degenerate_split = 12,
    empty_input = 13,
    unknown_group = 14,
    eval_error = 15,
    numeric_error = 16,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const { return code_; }
    int exit_code() const { return static_cast<int>(code_); }

private:
    ErrorCode code_;
};

#define WINOREG_DEFINE_ERROR(Name, Code)                        \
    class Name : public Error {                                 \
    public:                                                     \
        explicit Name(const std::string& what)                  \
            : Error(ErrorCode::Code, what) {}                   \
    }

WINOREG_DEFINE_ERROR(ParseError, parse_error);
WINOREG_DEFINE_ERROR(ValidationError, validation_error);
WINOREG_DEFINE_ERROR(IoError, io_error);
WINOREG_DEFINE_ERROR(ConfigError, config_error);
WINOREG_DEFINE_ERROR(FormatError, format_error);
WINOREG_DEFINE_ERROR(VersionError, version_error);
WINOREG_DEFINE_ERROR(CacheMissOffline, cache_miss_offline);
WINOREG_DEFINE_ERROR(NetworkError, network_error);
WINOREG_DEFINE_ERROR(DimensionError, dimension_error);
WINOREG_DEFINE_ERROR(DegenerateSplit, degenerate_split);
WINOREG_DEFINE_ERROR(EmptyInput, empty_input);
WINOREG_DEFINE_ERROR(UnknownGroup, unknown_group);
WINOREG_DEFINE_ERROR(EvalError, eval_error);
WINOREG_DEFINE_ERROR(NumericError, numeric_error);

#undef WINOREG_DEFINE_ERROR

} // namespace winoreg

#endif
