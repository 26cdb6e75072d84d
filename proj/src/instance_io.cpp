#include "gwot/instance_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

namespace gwot {

namespace {

class LeWriter {
public:
    void u64(std::uint64_t x)
    {
        for (int k = 0; k < 8; ++k) bytes_.push_back(static_cast<char>((x >> (8 * k)) & 0xffU));
    }
    void f64(double x) { u64(std::bit_cast<std::uint64_t>(x)); }
    void raw(const char* data, size_t len) { bytes_.insert(bytes_.end(), data, data + len); }

    const std::vector<char>& bytes() const { return bytes_; }

private:
    std::vector<char> bytes_;
};

class LeReader {
public:
    LeReader(std::vector<char> bytes, std::string origin) : bytes_(std::move(bytes)), origin_(std::move(origin)) {}

    std::uint64_t u64()
    {
        need(8);
        std::uint64_t x = 0;
        for (int k = 0; k < 8; ++k) {
            x |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + static_cast<size_t>(k)])) << (8 * k);
        }
        pos_ += 8;
        return x;
    }
    double f64() { return std::bit_cast<double>(u64()); }

    std::string raw(size_t len)
    {
        need(len);
        std::string out(bytes_.data() + pos_, len);
        pos_ += len;
        return out;
    }

    size_t remaining() const { return bytes_.size() - pos_; }

    [[noreturn]] void fail(const std::string& what) const { throw FormatError(origin_ + ": " + what); }

private:
    void need(size_t len) const
    {
        if (remaining() < len) fail("truncated instance file");
    }

    std::vector<char> bytes_;
    std::string origin_;
    size_t pos_ = 0;
};

void write_adjacency(LeWriter& w, const Adjacency& adj)
{
    for (Index i = 0; i < adj.rows(); ++i) {
        for (Index j = 0; j < adj.cols(); ++j) w.f64(adj(i, j) ? 1.0 : 0.0);
    }
}

Adjacency read_adjacency(LeReader& r, Index n)
{
    Adjacency adj(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            const double x = r.f64();
            if (x != 0.0 && x != 1.0) r.fail("adjacency entries must be 0 or 1");
            adj(i, j) = x == 1.0 ? 1 : 0;
        }
    }
    return adj;
}

Matrix read_matrix(LeReader& r, Index n)
{
    Matrix m(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) m(i, j) = r.f64();
    }
    return m;
}

} // namespace

std::uintmax_t instance_file_size(Index n)
{
    const auto nn = static_cast<std::uintmax_t>(n);
    return kInstanceHeaderBytes + kInstanceMetadataBytes + 8 * (2 * nn * nn + 2 * nn * nn + nn);
}

void save_instance(const AlignmentInstance& instance, const std::filesystem::path& path)
{
    const Index n = instance.size();
    LeWriter w;
    w.raw(kInstanceMagic, 5);
    w.u64(static_cast<std::uint64_t>(n));
    w.f64(instance.p_edge);
    w.f64(instance.eta);
    w.u64(instance.seed);
    write_adjacency(w, instance.adjacency_1);
    write_adjacency(w, instance.adjacency_2);
    for (const auto* c : {&instance.c1, &instance.c2}) {
        for (Index i = 0; i < n; ++i) {
            for (Index j = 0; j < n; ++j) w.f64((*c)(i, j));
        }
    }
    for (Index x : instance.perm_true) w.u64(static_cast<std::uint64_t>(x));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

AlignmentInstance load_instance(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string() + " for reading");
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    LeReader r(std::move(bytes), path.string());

    if (r.raw(5) != std::string(kInstanceMagic, 5)) r.fail("bad magic string, not a GWAI1 instance");
    const std::uint64_t n64 = r.u64();
    if (n64 < 2 || n64 > (1U << 20)) r.fail("implausible instance size " + std::to_string(n64));
    const auto n = static_cast<Index>(n64);

    AlignmentInstance inst;
    inst.p_edge = r.f64();
    inst.eta = r.f64();
    inst.seed = r.u64();
    inst.adjacency_1 = read_adjacency(r, n);
    inst.adjacency_2 = read_adjacency(r, n);
    Matrix c1 = read_matrix(r, n);
    Matrix c2 = read_matrix(r, n);
    inst.perm_true.resize(static_cast<size_t>(n));
    for (auto& x : inst.perm_true) {
        const std::uint64_t v = r.u64();
        if (v >= n64) r.fail("permutation entry out of range");
        x = static_cast<Index>(v);
    }
    if (r.remaining() != 0) r.fail("trailing bytes after instance payload");

    try {
        inst.c1 = CostMatrix(std::move(c1));
        inst.c2 = CostMatrix(std::move(c2));
        (void)inverse_permutation(inst.perm_true);
    } catch (const std::invalid_argument& e) {
        r.fail(e.what());
    }
    inst.p = Marginals::uniform(n);
    inst.q = Marginals::uniform(n);
    return inst;
}

} // namespace gwot
