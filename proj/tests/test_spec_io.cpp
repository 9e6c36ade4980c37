#include <cmath>
#include <cstdio>
#include <fstream>
#include <gtest/gtest.h>

#include "maplk/errors.hpp"
#include "maplk/families.hpp"
#include "maplk/map_core.hpp"
#include "maplk/spec_io.hpp"

using namespace maplk;

namespace {

const char* kReference = R"(# reference compound-Poisson MAP
rates.plus_minus = 1
rates.minus_plus = 1
plus.drift = 0.1
plus.jump_rate = 1
plus.jump_law = deterministic(0.5)
minus.drift = -0.2
minus.jump_rate = 1
minus.jump_law = deterministic(-0.5)
transition.plus_minus = deterministic(-0.3)
transition.minus_plus = deterministic(0)
)";

int error_line(const std::string& text) {
    try {
        parse_spec(text);
    } catch (const SchemaError& e) {
        return e.line();
    }
    return -1;
}

}  // namespace

// =============================================================================
// Parsing
// =============================================================================

TEST(SpecIo, ParsesReferenceMap) {
    const MapSpec s = parse_spec(kReference);
    const MapSpec r = reference_map();
    for (double z : {-1.0, 0.0, 0.4, 2.0}) EXPECT_EQ(max_abs_diff(evaluate_F(s, z).m, evaluate_F(r, z).m), 0.0);
}

TEST(SpecIo, RoundTrip) {
    MapSpec s = reference_map();
    s.plus.gaussian_variance = 0.25;
    s.plus.killing_rate = 0.05;
    s.minus.jump_law = JumpLaw::two_sided_exponential(0.3, 5.0, 2.5);
    s.u_mp = JumpLaw::normal(0.1, 0.3);
    s.domain = {-2.0, 1.5, false, true};
    const std::string text = format_spec(s);
    const MapSpec back = parse_spec(text);
    EXPECT_EQ(format_spec(back), text);
    for (double z : {-1.9, -0.3, 0.0, 1.5})
        EXPECT_EQ(max_abs_diff(evaluate_F(back, z).m, evaluate_F(s, z).m), 0.0);
}

TEST(SpecIo, Intervals) {
    const Interval d = parse_interval("[0, inf)");
    EXPECT_TRUE(d.lo_closed);
    EXPECT_FALSE(d.hi_closed);
    EXPECT_EQ(d.lo, 0.0);
    EXPECT_TRUE(std::isinf(d.hi));
    EXPECT_EQ(format_interval(parse_interval(format_interval(d))), format_interval(d));
    EXPECT_THROW(parse_interval("(1, 0)"), SchemaError);
    EXPECT_THROW(parse_interval("0, 1"), SchemaError);
}

TEST(SpecIo, CommentsAndBlankLines) {
    const std::string text = std::string("\n   # leading comment\n") + kReference + "plus.drift_note = 1\n";
    EXPECT_EQ(error_line(text), 14);
}

// =============================================================================
// Errors
// =============================================================================

TEST(SpecIo, UnknownKeyReportsLine) {
    EXPECT_EQ(error_line("rates.plus_minus = 1\nrates.minus_plus = 1\nplus.drfit = 3\n"), 3);
}

TEST(SpecIo, DuplicateKeyReportsLine) {
    EXPECT_EQ(error_line("rates.plus_minus = 1\nrates.plus_minus = 2\nrates.minus_plus = 1\n"), 2);
}

TEST(SpecIo, BadNumberReportsLine) {
    EXPECT_EQ(error_line("rates.plus_minus = one\nrates.minus_plus = 1\n"), 1);
    EXPECT_EQ(error_line("rates.plus_minus = 1\nrates.minus_plus = 1x\n"), 2);
}

TEST(SpecIo, BadLawReportsLine) {
    EXPECT_EQ(error_line("rates.plus_minus = 1\nrates.minus_plus = 1\nplus.jump_law = cauchy(0, 1)\n"), 3);
    EXPECT_EQ(error_line("rates.plus_minus = 1\nrates.minus_plus = 1\nplus.jump_law = normal(0, -1)\n"), 3);
}

TEST(SpecIo, MissingRequiredKey) {
    EXPECT_THROW(parse_spec("rates.plus_minus = 1\n"), SchemaError);
}

TEST(SpecIo, MissingEqualsSign) {
    EXPECT_EQ(error_line("rates.plus_minus 1\n"), 1);
}

TEST(SpecIo, ReducibleMustBeFlagged) {
    EXPECT_THROW(parse_spec("rates.plus_minus = 1\nrates.minus_plus = 0\n"), SchemaError);
    EXPECT_NO_THROW(parse_spec("rates.plus_minus = 1\nrates.minus_plus = 0\nrates.reducible = true\n"));
}

TEST(SpecIo, JumpRateWithoutLaw) {
    EXPECT_THROW(parse_spec("rates.plus_minus = 1\nrates.minus_plus = 1\nplus.jump_rate = 2\n"), SchemaError);
}

TEST(SpecIo, LoadFile) {
    const std::string path = ::testing::TempDir() + "maplk_spec_io_test.txt";
    {
        std::ofstream out(path);
        out << kReference;
    }
    EXPECT_NO_THROW(load_spec_file(path));
    std::remove(path.c_str());
    EXPECT_THROW(load_spec_file(path), Error);
}
