#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include <doctest.h>

#include "sdreg/dataset.hpp"
#include "sdreg/errors.hpp"
#include "sdreg/rng.hpp"

using namespace sdreg;

namespace {

std::string temp_path(const std::string& stem) {
    static int counter = 0;
    const auto dir = std::filesystem::temp_directory_path();
    return (dir / (stem + "-" + std::to_string(counter++) + ".csv")).string();
}

std::string write_temp(const std::string& stem, const std::string& content) {
    const std::string path = temp_path(stem);
    std::ofstream out(path);
    out << content;
    return path;
}

}  // namespace

TEST_CASE("rng streams are deterministic and well ranged") {
    Rng a(42);
    Rng b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    Rng r(7);
    for (int i = 0; i < 1000; ++i) {
        const double u = r.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    for (int i = 0; i < 1000; ++i) {
        const double u = r.uniform(-2.0, 3.0);
        CHECK(u >= -2.0);
        CHECK(u < 3.0);
    }
    for (int i = 0; i < 1000; ++i) CHECK(r.below(10) < 10);
}

TEST_CASE("rng normal moments") {
    Rng r(2024);
    const int n = 40000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = r.normal();
        sum += z;
        sq += z * z;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(std::abs(mean) < 0.02);
    CHECK(std::abs(var - 1.0) < 0.03);
}

TEST_CASE("derive_seed separates streams") {
    const std::uint64_t base = derive_seed(1, 2);
    CHECK(base != derive_seed(1, 3));
    CHECK(base != derive_seed(2, 2));
    CHECK(derive_seed(1, 2, 1) != derive_seed(1, 2, 2));
    CHECK(derive_seed(1, 2, 1, 1) != derive_seed(1, 2, 1, 2));
    // derivation is pure
    CHECK(derive_seed(9, 9, 9, 9) == derive_seed(9, 9, 9, 9));
}

TEST_CASE("sampling without replacement and shuffling") {
    Rng r(5);
    const auto picks = r.sample_without_replacement(100, 10);
    REQUIRE(picks.size() == 10);
    std::set<int> uniq(picks.begin(), picks.end());
    CHECK(uniq.size() == 10);
    for (int v : picks) {
        CHECK(v >= 0);
        CHECK(v < 100);
    }

    std::vector<long> perm{0, 1, 2, 3, 4, 5, 6, 7};
    r.shuffle(perm);
    std::set<long> seen(perm.begin(), perm.end());
    CHECK(seen.size() == 8);
}

TEST_CASE("batches") {
    const Batch fb = full_batch(5);
    REQUIRE(fb.size() == 5);
    CHECK(fb.indices[0] == 0);
    CHECK(fb.indices[4] == 4);

    Rng r(3);
    const Batch sb = sample_batch(50, 8, r);
    REQUIRE(sb.size() == 8);
    std::set<int> uniq(sb.indices.begin(), sb.indices.end());
    CHECK(uniq.size() == 8);
}

TEST_CASE("synthetic data matches its hidden plane") {
    const SynthResult synth = synth_generate(200, 6, 11);
    const Dataset& data = synth.data;
    REQUIRE(data.size() == 200);
    REQUIRE(data.dim() == 6);
    CHECK(data.name == "synth-n200-d6");
    data.validate();

    for (long i = 0; i < data.size(); ++i) {
        double margin = 0.0;
        for (int j = 0; j < 6; ++j) {
            const double v = data.features(i, j);
            CHECK(v >= 0.0);
            CHECK(v < 1.0);
            margin += synth.theta_bar[static_cast<std::size_t>(j)] * v;
        }
        CHECK(data.labels[static_cast<std::size_t>(i)] == (margin > 0.0 ? 1 : 0));
    }

    const SynthResult again = synth_generate(200, 6, 11);
    CHECK(again.data.features(123, 3) == data.features(123, 3));
    const SynthResult other = synth_generate(200, 6, 12);
    bool same = true;
    for (long i = 0; i < 200 && same; ++i)
        for (int j = 0; j < 6; ++j)
            if (other.data.features(i, j) != data.features(i, j)) same = false;
    CHECK_FALSE(same);
}

TEST_CASE("standardize and bias column") {
    Dataset data = synth_generate(500, 3, 21).data;
    standardize_features(data);
    for (int j = 0; j < 3; ++j) {
        double mean = 0.0, sq = 0.0;
        for (long i = 0; i < data.size(); ++i) {
            mean += data.features(i, j);
            sq += data.features(i, j) * data.features(i, j);
        }
        mean /= static_cast<double>(data.size());
        const double var = sq / static_cast<double>(data.size()) - mean * mean;
        CHECK(mean == doctest::Approx(0.0).epsilon(1e-10));
        CHECK(var == doctest::Approx(1.0).epsilon(1e-10));
    }

    append_bias_column(data);
    REQUIRE(data.dim() == 4);
    for (long i = 0; i < data.size(); ++i) CHECK(data.features(i, 3) == 1.0);

    // a constant column survives standardization untouched
    standardize_features(data);
    for (long i = 0; i < data.size(); ++i) CHECK(data.features(i, 3) == 1.0);
}

TEST_CASE("save and load round trip") {
    const Dataset data = synth_generate(40, 3, 31).data;
    const std::string path = temp_path("roundtrip");
    save_delimited(data, path);

    const Dataset back = load_delimited(path);
    REQUIRE(back.size() == data.size());
    REQUIRE(back.dim() == data.dim());
    for (long i = 0; i < data.size(); ++i) {
        CHECK(back.labels[static_cast<std::size_t>(i)] == data.labels[static_cast<std::size_t>(i)]);
        for (int j = 0; j < data.dim(); ++j)
            CHECK(back.features(i, j) == data.features(i, j));
    }
    std::remove(path.c_str());
}

TEST_CASE("delimited loader options and failure modes") {
    CHECK_THROWS_AS((void)load_delimited("/nonexistent/file.csv"), IoError);

    {
        const std::string path = write_temp("ragged", "1,2,0\n1,2\n");
        CHECK_THROWS_WITH_AS((void)load_delimited(path),
                             doctest::Contains("(line 2)"), ParseError);
        std::remove(path.c_str());
    }
    {
        const std::string path = write_temp("nonnum", "1,2,0\n1,abc,1\n");
        CHECK_THROWS_AS((void)load_delimited(path), ParseError);
        std::remove(path.c_str());
    }
    {
        const std::string path = write_temp("triple", "1,2,0\n1,3,1\n1,4,2\n");
        CHECK_THROWS_AS((void)load_delimited(path), NonBinaryLabels);
        std::remove(path.c_str());
    }
    {
        const std::string path = write_temp("badcol", "1,2,0\n");
        LoadOptions opts;
        opts.label_column = 9;
        CHECK_THROWS_AS((void)load_delimited(path, opts), MissingColumn);
        std::remove(path.c_str());
    }
    {
        // header skipping plus text labels with a chosen positive class
        const std::string path = write_temp("header", "f1,f2,cls\n0.5,1.5,spam\n0.25,2.5,ham\n");
        LoadOptions opts;
        opts.has_header = true;
        opts.positive_label = "spam";
        const Dataset data = load_delimited(path, opts);
        REQUIRE(data.size() == 2);
        CHECK(data.labels[0] == 1);
        CHECK(data.labels[1] == 0);
        CHECK(data.features(1, 1) == doctest::Approx(2.5));
        std::remove(path.c_str());
    }
    {
        // tab delimiter and a non-final label column
        const std::string path = write_temp("tabbed", "1\t0.5\t1.5\n0\t0.25\t2.5\n");
        LoadOptions opts;
        opts.delimiter = '\t';
        opts.label_column = 0;
        const Dataset data = load_delimited(path, opts);
        REQUIRE(data.dim() == 2);
        CHECK(data.labels[0] == 1);
        CHECK(data.features(0, 0) == doctest::Approx(0.5));
        std::remove(path.c_str());
    }
}

TEST_CASE("k-fold split partitions evenly") {
    const FoldPlan plan = kfold_split(1370, 5, 99);
    REQUIRE(plan.k == 5);
    REQUIRE(plan.assignment.size() == 1370);

    for (int f = 0; f < 5; ++f) {
        const auto test = plan.test_indices(f);
        const auto train = plan.train_indices(f);
        CHECK(test.size() == 274);
        CHECK(train.size() == 1096);
    }

    // every row lands in exactly one test fold
    std::vector<int> hit(1370, 0);
    for (int f = 0; f < 5; ++f)
        for (long i : plan.test_indices(f)) hit[static_cast<std::size_t>(i)] += 1;
    for (int h : hit) CHECK(h == 1);

    const FoldPlan same = kfold_split(1370, 5, 99);
    CHECK(same.assignment == plan.assignment);
    const FoldPlan other = kfold_split(1370, 5, 100);
    CHECK(other.assignment != plan.assignment);

    // uneven n: sizes differ by at most one
    const FoldPlan odd = kfold_split(103, 4, 1);
    for (int f = 0; f < 4; ++f) {
        const std::size_t sz = odd.test_indices(f).size();
        CHECK(sz >= 25);
        CHECK(sz <= 26);
    }

    CHECK_THROWS_AS((void)kfold_split(3, 5, 1), DimensionMismatch);
}

TEST_CASE("subset extracts the requested rows") {
    const Dataset data = synth_generate(20, 2, 8).data;
    const Dataset sub = subset(data, {3, 7, 11});
    REQUIRE(sub.size() == 3);
    CHECK(sub.features(0, 0) == data.features(3, 0));
    CHECK(sub.features(2, 1) == data.features(11, 1));
    CHECK(sub.labels[1] == data.labels[7]);
}
