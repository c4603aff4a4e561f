#ifndef HALFDISK_MESH_IO_HPP
#define HALFDISK_MESH_IO_HPP

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "halfdisk/errors.hpp"
#include "halfdisk/mesh.hpp"

// Text mesh format:
//   halfdisk-mesh v1
//   <nv>            followed by nv lines  "x y"
//   <nt>            followed by nt lines  "i j k"
//   <nb>            followed by nb lines  "i j tag arcflag"   (tag D|N)
// Coordinates use 17 significant digits so read/write round-trips exactly.

namespace halfdisk {

inline void write_mesh(const TriMesh& m, std::ostream& os) {
    char buf[96];
    os << "halfdisk-mesh v1\n";
    os << m.vertices.size() << "\n";
    for (const auto& v : m.vertices) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", v.x, v.y);
        os << buf;
    }
    os << m.triangles.size() << "\n";
    for (const auto& t : m.triangles) os << t[0] << " " << t[1] << " " << t[2] << "\n";
    os << m.boundary_edges.size() << "\n";
    for (const auto& e : m.boundary_edges)
        os << e.a << " " << e.b << " " << (e.tag == BcKind::Dirichlet ? 'D' : 'N') << " "
           << (e.on_arc ? 1 : 0) << "\n";
}

inline void write_mesh_file(const TriMesh& m, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_mesh_file: cannot open " + path);
    write_mesh(m, os);
}

inline TriMesh read_mesh(std::istream& is) {
    std::string header, version;
    is >> header >> version;
    if (header != "halfdisk-mesh" || version != "v1")
        throw IntegrityError("read_mesh: bad header");
    TriMesh m;
    std::size_t nv = 0, nt = 0, nb = 0;
    is >> nv;
    m.vertices.resize(nv);
    for (auto& v : m.vertices) is >> v.x >> v.y;
    is >> nt;
    m.triangles.resize(nt);
    for (auto& t : m.triangles) is >> t[0] >> t[1] >> t[2];
    is >> nb;
    m.boundary_edges.resize(nb);
    for (auto& e : m.boundary_edges) {
        char tag;
        int arc;
        is >> e.a >> e.b >> tag >> arc;
        if (tag != 'D' && tag != 'N') throw IntegrityError("read_mesh: bad edge tag");
        e.tag = tag == 'D' ? BcKind::Dirichlet : BcKind::Neumann;
        e.on_arc = arc != 0;
    }
    if (!is) throw IntegrityError("read_mesh: truncated file");
    return m;
}

inline TriMesh read_mesh_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("read_mesh_file: cannot open " + path);
    return read_mesh(is);
}

} // namespace halfdisk

#endif
