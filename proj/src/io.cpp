#include "idseries/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include "idseries/error.hpp"

namespace idseries {

namespace {

constexpr const char* kModule = "cli";

[[noreturn]] void parse_fail(const std::string& source, std::size_t line, const std::string& msg) {
    std::ostringstream os;
    os << source << ":" << line << ": " << msg;
    throw Error(kModule, ErrorCode::parse, os.str());
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Non-empty lines with comments stripped, remembering line numbers.
class Lines {
public:
    Lines(std::istream& in, std::string source) : source_(std::move(source)) {
        std::string raw;
        std::size_t n = 0;
        while (std::getline(in, raw)) {
            ++n;
            const auto hash = raw.find('#');
            if (hash != std::string::npos) raw.erase(hash);
            std::string t = trim(raw);
            if (!t.empty()) lines_.push_back({n, std::move(t)});
        }
    }

    bool done() const noexcept { return pos_ >= lines_.size(); }
    const std::string& peek() const { return lines_[pos_].second; }
    std::size_t line_no() const { return done() ? lines_.empty() ? 0 : lines_.back().first : lines_[pos_].first; }
    const std::string& next() { return lines_[pos_++].second; }
    const std::string& source() const noexcept { return source_; }

    [[noreturn]] void fail(const std::string& msg) const { parse_fail(source_, line_no(), msg); }

private:
    std::string source_;
    std::vector<std::pair<std::size_t, std::string>> lines_;
    std::size_t pos_ = 0;
};

double parse_real(const std::string& token, const Lines& lines) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(token, &used);
    } catch (const std::exception&) {
        lines.fail("malformed number '" + token + "'");
    }
    if (used != token.size()) lines.fail("malformed number '" + token + "'");
    if (!std::isfinite(v)) lines.fail("non-finite number '" + token + "'");
    return v;
}

std::size_t parse_count(const std::string& token, const Lines& lines) {
    const double v = parse_real(token, lines);
    if (v < 1.0 || v != std::floor(v) || v > 1e6) lines.fail("expected a positive integer, got '" + token + "'");
    return static_cast<std::size_t>(v);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

Matrix parse_block(Lines& lines) {
    if (lines.done()) lines.fail("expected a matrix header");
    const std::vector<std::string> head = split_ws(lines.next());
    if (head.empty() || head.size() > 2) lines.fail("matrix header must be `d` or `M N`");
    const std::size_t rows = parse_count(head[0], lines);
    const std::size_t cols = head.size() == 2 ? parse_count(head[1], lines) : rows;
    Matrix a(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (lines.done()) lines.fail("matrix ended after " + std::to_string(i) + " rows");
        const std::vector<std::string> row = split_ws(lines.next());
        if (row.size() != cols)
            lines.fail("expected " + std::to_string(cols) + " entries, got " + std::to_string(row.size()));
        for (std::size_t j = 0; j < cols; ++j) a(i, j) = parse_real(row[j], lines);
    }
    return a;
}

SymMatrix to_sym(Matrix a, const Lines& lines, const std::string& what) {
    if (!a.square()) lines.fail(what + " must be square");
    try {
        return SymMatrix(std::move(a));
    } catch (const Error& e) {
        lines.fail(what + ": " + e.what());
    }
}

std::ifstream open(const std::string& path, const std::string& what) {
    std::ifstream in(path);
    if (!in) throw Error(kModule, ErrorCode::missing_input, "cannot open " + what + " file '" + path + "'");
    return in;
}

}  // namespace

IdModel parse_model(std::istream& in, const std::string& source) {
    Lines lines(in, source);
    bool have_sigma = false;
    double sigma2 = 0.0;
    std::vector<Atom> atoms;
    while (!lines.done()) {
        const std::string line = lines.peek();
        const auto eq = line.find('=');
        if (eq == std::string::npos) lines.fail("expected `key = value`");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "sigma2") {
            if (have_sigma) lines.fail("sigma2 given twice");
            sigma2 = parse_real(value, lines);
            have_sigma = true;
        } else if (key == "atom") {
            const auto comma = value.find(',');
            if (comma == std::string::npos) lines.fail("atom must be `<u>,<w>`");
            atoms.push_back({parse_real(trim(value.substr(0, comma)), lines),
                             parse_real(trim(value.substr(comma + 1)), lines)});
        } else {
            lines.fail("unknown model key '" + key + "'");
        }
        lines.next();
    }
    if (!have_sigma) lines.fail("missing sigma2");
    try {
        return IdModel(sigma2, LevyMeasure(std::move(atoms)));
    } catch (const Error& e) {
        throw Error(kModule, ErrorCode::parse, source + ": " + e.what());
    }
}

IdModel read_model(const std::string& path) {
    std::ifstream in = open(path, "model");
    return parse_model(in, path);
}

std::vector<Matrix> parse_matrices(std::istream& in, const std::string& source) {
    Lines lines(in, source);
    std::vector<Matrix> out;
    while (!lines.done()) out.push_back(parse_block(lines));
    if (out.empty()) lines.fail("no matrices");
    return out;
}

std::vector<Matrix> read_matrices(const std::string& path) {
    std::ifstream in = open(path, "series");
    return parse_matrices(in, path);
}

std::vector<SymMatrix> read_symmetric_series(const std::string& path) {
    std::ifstream in = open(path, "series");
    Lines lines(in, path);
    std::vector<SymMatrix> out;
    while (!lines.done()) out.push_back(to_sym(parse_block(lines), lines, "series term"));
    if (out.empty()) lines.fail("no matrices");
    return out;
}

QuadProblem parse_quad_problem(std::istream& in, const std::string& source) {
    Lines lines(in, source);
    std::size_t M = 0, N = 0;
    std::optional<SymMatrix> objective;
    std::vector<SymMatrix> ineq;
    Matrix eq;
    while (!lines.done()) {
        const std::vector<std::string> words = split_ws(lines.next());
        const std::string& key = words.front();
        if (key == "dims") {
            if (words.size() != 3) lines.fail("dims needs `dims M N`");
            M = parse_count(words[1], lines);
            N = parse_count(words[2], lines);
        } else if (words.size() != 1) {
            lines.fail("unexpected line '" + key + "'");
        } else if (key == "objective") {
            if (objective) lines.fail("objective given twice");
            objective = to_sym(parse_block(lines), lines, "objective");
        } else if (key == "B") {
            ineq.push_back(to_sym(parse_block(lines), lines, "B"));
        } else if (key == "C") {
            if (eq.rows() > 0) lines.fail("C given twice");
            eq = parse_block(lines);
        } else {
            lines.fail("unknown block '" + key + "'");
        }
    }
    if (M == 0) lines.fail("missing `dims M N`");
    if (!objective) lines.fail("missing objective");
    try {
        return QuadProblem(M, N, std::move(*objective), std::move(ineq), std::move(eq));
    } catch (const Error& e) {
        throw Error(kModule, ErrorCode::parse, source + ": " + e.what());
    }
}

QuadProblem read_quad_problem(const std::string& path) {
    std::ifstream in = open(path, "problem");
    return parse_quad_problem(in, path);
}

ChanceProblem parse_chance_problem(std::istream& in, const std::string& source) {
    Lines lines(in, source);
    std::optional<SymMatrix> base;
    std::vector<SymMatrix> terms;
    while (!lines.done()) {
        const std::string key = lines.next();
        if (key == "base") {
            if (base) lines.fail("base given twice");
            base = to_sym(parse_block(lines), lines, "base");
        } else if (key == "term") {
            terms.push_back(to_sym(parse_block(lines), lines, "term"));
        } else {
            lines.fail("unknown block '" + key + "'");
        }
    }
    if (!base) lines.fail("missing base");
    try {
        return ChanceProblem(std::move(*base), std::move(terms));
    } catch (const Error& e) {
        throw Error(kModule, ErrorCode::parse, source + ": " + e.what());
    }
}

ChanceProblem read_chance_problem(const std::string& path) {
    std::ifstream in = open(path, "problem");
    return parse_chance_problem(in, path);
}

std::string format_real(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace idseries
