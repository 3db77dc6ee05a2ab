#include "poro/mesh.hpp"

#include "poro/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <unordered_map>

namespace poro {

namespace {

std::uint64_t edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

double signed_area(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
    return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

}  // namespace

Mesh::Mesh(std::vector<Eigen::Vector2d> vertices, std::vector<std::array<int, 3>> cells,
           std::vector<BoundaryEdge> boundary, int level)
    : vertices_(std::move(vertices)), cells_(std::move(cells)), boundary_(std::move(boundary)), level_(level) {
    const int nv = num_vertices();
    if (nv < 3 || cells_.empty()) throw ValidationError("mesh: needs at least one cell");
    for (const auto& x : vertices_) {
        if (!x.allFinite()) throw ValidationError("mesh: non-finite vertex coordinate");
    }

    struct EdgeUse {
        int id;
        int count;
        int owner;  // cell that first used the edge
        int from;   // orientation in the owner cell
    };
    std::unordered_map<std::uint64_t, EdgeUse> table;
    table.reserve(cells_.size() * 2);
    cell_edges_.resize(cells_.size());

    for (int c = 0; c < num_cells(); ++c) {
        const auto& t = cells_[c];
        for (int k = 0; k < 3; ++k) {
            if (t[k] < 0 || t[k] >= nv) {
                throw ValidationError("mesh: cell " + std::to_string(c) + " references vertex out of range");
            }
        }
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
            throw ValidationError("mesh: cell " + std::to_string(c) + " is degenerate");
        }
        if (!(cell_area(c) > 0.0)) {
            throw ValidationError("mesh: cell " + std::to_string(c) + " has non-positive signed area");
        }
        for (int k = 0; k < 3; ++k) {
            const int a = t[k];
            const int b = t[(k + 1) % 3];
            auto [it, inserted] = table.try_emplace(edge_key(a, b), EdgeUse{num_edges(), 0, c, a});
            if (inserted) edges_.push_back({std::min(a, b), std::max(a, b)});
            if (++it->second.count > 2) {
                throw ValidationError("mesh: nonconforming, edge (" + std::to_string(a) + "," + std::to_string(b) +
                                      ") shared by more than two cells");
            }
            cell_edges_[c][k] = it->second.id;
        }
    }

    std::vector<char> covered(edges_.size(), 0);
    boundary_edge_ids_.resize(boundary_.size());
    for (std::size_t b = 0; b < boundary_.size(); ++b) {
        auto& e = boundary_[b];
        auto it = table.find(edge_key(e.v[0], e.v[1]));
        if (it == table.end() || it->second.count != 1) {
            throw ValidationError("mesh: dangling boundary edge (" + std::to_string(e.v[0]) + "," +
                                  std::to_string(e.v[1]) + ") is not on the topological boundary");
        }
        if (covered[it->second.id]) {
            throw ValidationError("mesh: boundary edge (" + std::to_string(e.v[0]) + "," + std::to_string(e.v[1]) +
                                  ") listed twice");
        }
        covered[it->second.id] = 1;
        boundary_edge_ids_[b] = it->second.id;
        if (e.v[0] != it->second.from) std::swap(e.v[0], e.v[1]);
    }
    for (const auto& [key, use] : table) {
        if (use.count == 1 && !covered[use.id]) {
            const auto& e = edges_[use.id];
            throw ValidationError("mesh: boundary edge (" + std::to_string(e[0]) + "," + std::to_string(e[1]) +
                                  ") missing from the BOUNDARY list");
        }
    }
}

double Mesh::cell_area(int c) const {
    const auto& t = cells_[c];
    return signed_area(vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]);
}

double Mesh::total_area() const {
    double s = 0.0;
    for (int c = 0; c < num_cells(); ++c) s += cell_area(c);
    return s;
}

double Mesh::max_edge_length() const {
    double h = 0.0;
    for (const auto& e : edges_) h = std::max(h, (vertices_[e[1]] - vertices_[e[0]]).norm());
    return h;
}

Eigen::Vector2d Mesh::outward_normal(int b) const {
    const Eigen::Vector2d d = vertices_[boundary_[b].v[1]] - vertices_[boundary_[b].v[0]];
    return Eigen::Vector2d(d.y(), -d.x()) / d.norm();
}

double Mesh::boundary_edge_length(int b) const {
    return (vertices_[boundary_[b].v[1]] - vertices_[boundary_[b].v[0]]).norm();
}

bool operator==(const Mesh& a, const Mesh& b) {
    if (a.level_ != b.level_ || a.vertices_.size() != b.vertices_.size() || a.cells_ != b.cells_ ||
        a.boundary_.size() != b.boundary_.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.vertices_.size(); ++i) {
        if (a.vertices_[i] != b.vertices_[i]) return false;
    }
    for (std::size_t i = 0; i < a.boundary_.size(); ++i) {
        if (a.boundary_[i].v != b.boundary_[i].v || a.boundary_[i].tag != b.boundary_[i].tag) return false;
    }
    return true;
}

Mesh crossed_rectangle_mesh(double x0, double x1, double y0, double y1, int n) {
    if (n < 1) throw ValidationError("mesh generator: n must be >= 1");
    if (!(x1 > x0 && y1 > y0)) throw ValidationError("mesh generator: empty rectangle");
    const int np = n + 1;
    std::vector<Eigen::Vector2d> verts;
    verts.reserve(np * np + n * n);
    auto xc = [&](int i) { return x0 + (x1 - x0) * static_cast<double>(i) / n; };
    auto yc = [&](int j) { return y0 + (y1 - y0) * static_cast<double>(j) / n; };
    for (int j = 0; j < np; ++j) {
        for (int i = 0; i < np; ++i) verts.emplace_back(xc(i), yc(j));
    }
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            verts.emplace_back(0.5 * (xc(i) + xc(i + 1)), 0.5 * (yc(j) + yc(j + 1)));
        }
    }
    auto grid = [np](int i, int j) { return j * np + i; };

    std::vector<std::array<int, 3>> cells;
    cells.reserve(4 * n * n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int c = np * np + j * n + i;
            const int v00 = grid(i, j), v10 = grid(i + 1, j), v11 = grid(i + 1, j + 1), v01 = grid(i, j + 1);
            cells.push_back({v00, v10, c});
            cells.push_back({v10, v11, c});
            cells.push_back({v11, v01, c});
            cells.push_back({v01, v00, c});
        }
    }

    std::vector<BoundaryEdge> bnd;
    bnd.reserve(4 * n);
    for (int i = 0; i < n; ++i) bnd.push_back({{grid(i, 0), grid(i + 1, 0)}, kBottom});
    for (int j = 0; j < n; ++j) bnd.push_back({{grid(n, j), grid(n, j + 1)}, kRight});
    for (int i = n; i > 0; --i) bnd.push_back({{grid(i, n), grid(i - 1, n)}, kTop});
    for (int j = n; j > 0; --j) bnd.push_back({{grid(0, j), grid(0, j - 1)}, kLeft});

    return Mesh(std::move(verts), std::move(cells), std::move(bnd), 0);
}

Mesh unit_square_mesh(int n) { return crossed_rectangle_mesh(0.0, 1.0, 0.0, 1.0, n); }

Mesh centered_square_mesh(int n) { return crossed_rectangle_mesh(-0.5, 0.5, -0.5, 0.5, n); }

Mesh refine_uniform(const Mesh& m) {
    std::vector<Eigen::Vector2d> verts = m.vertices();
    const int nv = m.num_vertices();
    for (const auto& e : m.edges()) verts.push_back(0.5 * (m.vertex(e[0]) + m.vertex(e[1])));

    std::vector<std::array<int, 3>> cells;
    cells.reserve(4 * m.cells().size());
    for (int c = 0; c < m.num_cells(); ++c) {
        const auto& t = m.cell(c);
        const auto& ce = m.cell_edges(c);
        const int m01 = nv + ce[0], m12 = nv + ce[1], m20 = nv + ce[2];
        cells.push_back({t[0], m01, m20});
        cells.push_back({m01, t[1], m12});
        cells.push_back({m20, m12, t[2]});
        cells.push_back({m01, m12, m20});
    }

    std::vector<BoundaryEdge> bnd;
    bnd.reserve(2 * m.boundary().size());
    for (std::size_t b = 0; b < m.boundary().size(); ++b) {
        const auto& e = m.boundary()[b];
        const int mid = nv + m.boundary_edge_id(static_cast<int>(b));
        bnd.push_back({{e.v[0], mid}, e.tag});
        bnd.push_back({{mid, e.v[1]}, e.tag});
    }
    return Mesh(std::move(verts), std::move(cells), std::move(bnd), m.level() + 1);
}

void write_mesh(const Mesh& m, std::ostream& out) {
    out << "# poro triangle mesh\n";
    out << "LEVEL " << m.level() << "\n";
    out << "VERTICES " << m.num_vertices() << "\n";
    out << std::setprecision(17);
    for (const auto& x : m.vertices()) out << x.x() << " " << x.y() << "\n";
    out << "CELLS " << m.num_cells() << "\n";
    for (const auto& t : m.cells()) out << t[0] << " " << t[1] << " " << t[2] << "\n";
    out << "BOUNDARY " << m.boundary().size() << "\n";
    for (const auto& e : m.boundary()) out << e.v[0] << " " << e.v[1] << " " << e.tag << "\n";
}

void write_mesh(const Mesh& m, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    write_mesh(m, out);
}

namespace {

class LineReader {
public:
    LineReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

    // Next non-empty, non-comment line split into tokens; false at EOF.
    bool next(std::vector<std::string>& tokens) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            std::istringstream ss(line);
            tokens.clear();
            for (std::string tok; ss >> tok;) tokens.push_back(tok);
            if (!tokens.empty()) return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, line_no_, what); }

    template <class T>
    T number(const std::string& tok) const {
        T value{};
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
        if (ec != std::errc() || ptr != tok.data() + tok.size()) fail("expected a number, got '" + tok + "'");
        return value;
    }

    void expect_count(const std::vector<std::string>& t, std::size_t n) const {
        if (t.size() != n) fail("expected " + std::to_string(n) + " fields, got " + std::to_string(t.size()));
    }

private:
    std::istream& in_;
    std::string source_;
    int line_no_ = 0;
};

}  // namespace

Mesh read_mesh(std::istream& in, const std::string& source) {
    LineReader reader(in, source);
    std::vector<std::string> tok;
    std::vector<Eigen::Vector2d> verts;
    std::vector<std::array<int, 3>> cells;
    std::vector<BoundaryEdge> bnd;
    int level = 0;
    bool have_v = false, have_c = false, have_b = false;

    while (reader.next(tok)) {
        const std::string key = tok[0];
        if (key == "LEVEL") {
            reader.expect_count(tok, 2);
            level = reader.number<int>(tok[1]);
            continue;
        }
        if (key != "VERTICES" && key != "CELLS" && key != "BOUNDARY") reader.fail("unknown section '" + key + "'");
        reader.expect_count(tok, 2);
        const long count = reader.number<long>(tok[1]);
        if (count < 0) reader.fail("negative count");
        for (long i = 0; i < count; ++i) {
            if (!reader.next(tok)) reader.fail("unexpected end of file in section " + key);
            if (key == "VERTICES") {
                reader.expect_count(tok, 2);
                verts.emplace_back(reader.number<double>(tok[0]), reader.number<double>(tok[1]));
            } else if (key == "CELLS") {
                reader.expect_count(tok, 3);
                cells.push_back({reader.number<int>(tok[0]), reader.number<int>(tok[1]), reader.number<int>(tok[2])});
            } else {
                reader.expect_count(tok, 3);
                bnd.push_back({{reader.number<int>(tok[0]), reader.number<int>(tok[1])}, reader.number<int>(tok[2])});
            }
        }
        (key == "VERTICES" ? have_v : key == "CELLS" ? have_c : have_b) = true;
    }
    if (!have_v || !have_c || !have_b) throw ParseError(source, 0, "missing VERTICES, CELLS or BOUNDARY section");
    return Mesh(std::move(verts), std::move(cells), std::move(bnd), level);
}

Mesh read_mesh(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open mesh file " + path.string());
    return read_mesh(in, path.string());
}

}  // namespace poro
