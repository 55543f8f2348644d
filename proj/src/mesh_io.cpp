#include "ergomesh/mesh_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace ergomesh {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

[[noreturn]] void parse_fail(const std::filesystem::path& path, int line, const std::string& what) {
    throw IoError(path.string() + ":" + std::to_string(line) + ": " + what);
}

TriangleMesh load_obj(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());

    TriangleMesh mesh;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ss(line);
        std::string tag;
        if (!(ss >> tag) || tag.empty() || tag[0] == '#') continue;
        if (tag == "v") {
            Eigen::Vector3d v;
            if (!(ss >> v.x() >> v.y() >> v.z())) parse_fail(path, line_no, "malformed vertex record");
            mesh.vertices.push_back(v);
        } else if (tag == "f") {
            std::vector<int> corners;
            std::string token;
            while (ss >> token) {
                // "i", "i/t", "i//n", "i/t/n": only the vertex index matters.
                std::size_t slash = token.find('/');
                std::string head = slash == std::string::npos ? token : token.substr(0, slash);
                int idx = 0;
                try {
                    idx = std::stoi(head);
                } catch (const std::exception&) {
                    parse_fail(path, line_no, "malformed face index '" + token + "'");
                }
                if (idx < 0) idx = static_cast<int>(mesh.vertices.size()) + idx + 1;
                corners.push_back(idx - 1);  // 1-based in file
            }
            if (corners.size() < 3) parse_fail(path, line_no, "face with fewer than 3 corners");
            for (std::size_t c = 1; c + 1 < corners.size(); ++c) {
                mesh.faces.push_back({corners[0], corners[c], corners[c + 1]});
            }
        }
        // Everything else (vn, vt, usemtl, o, g, s, ...) is ignored.
    }
    return mesh;
}

enum class PlyScalar { Char, UChar, Short, UShort, Int, UInt, Float, Double };

std::size_t ply_scalar_size(PlyScalar t) {
    switch (t) {
        case PlyScalar::Char:
        case PlyScalar::UChar: return 1;
        case PlyScalar::Short:
        case PlyScalar::UShort: return 2;
        case PlyScalar::Int:
        case PlyScalar::UInt:
        case PlyScalar::Float: return 4;
        case PlyScalar::Double: return 8;
    }
    return 0;
}

PlyScalar ply_scalar_from_name(const std::string& name, const std::filesystem::path& path, int line) {
    if (name == "char" || name == "int8") return PlyScalar::Char;
    if (name == "uchar" || name == "uint8") return PlyScalar::UChar;
    if (name == "short" || name == "int16") return PlyScalar::Short;
    if (name == "ushort" || name == "uint16") return PlyScalar::UShort;
    if (name == "int" || name == "int32") return PlyScalar::Int;
    if (name == "uint" || name == "uint32") return PlyScalar::UInt;
    if (name == "float" || name == "float32") return PlyScalar::Float;
    if (name == "double" || name == "float64") return PlyScalar::Double;
    parse_fail(path, line, "unsupported PLY scalar type '" + name + "'");
}

struct PlyProperty {
    std::string name;
    bool is_list = false;
    PlyScalar count_type = PlyScalar::UChar;
    PlyScalar value_type = PlyScalar::Float;
};

struct PlyElement {
    std::string name;
    std::size_t count = 0;
    std::vector<PlyProperty> properties;
};

class PlyReader {
public:
    PlyReader(std::istream& in, bool binary, const std::filesystem::path& path)
        : in_(in), binary_(binary), path_(path) {}

    double read_scalar(PlyScalar type) {
        if (binary_) return read_binary(type);
        double value = 0.0;
        if (!(in_ >> value)) throw IoError(path_.string() + ": truncated PLY body");
        return value;
    }

private:
    double read_binary(PlyScalar type) {
        unsigned char buf[8];
        in_.read(reinterpret_cast<char*>(buf), static_cast<std::streamsize>(ply_scalar_size(type)));
        if (!in_) throw IoError(path_.string() + ": truncated PLY body");
        switch (type) {
            case PlyScalar::Char: return static_cast<double>(static_cast<std::int8_t>(buf[0]));
            case PlyScalar::UChar: return static_cast<double>(buf[0]);
            case PlyScalar::Short: {
                std::int16_t v;
                std::memcpy(&v, buf, 2);
                return v;
            }
            case PlyScalar::UShort: {
                std::uint16_t v;
                std::memcpy(&v, buf, 2);
                return v;
            }
            case PlyScalar::Int: {
                std::int32_t v;
                std::memcpy(&v, buf, 4);
                return v;
            }
            case PlyScalar::UInt: {
                std::uint32_t v;
                std::memcpy(&v, buf, 4);
                return v;
            }
            case PlyScalar::Float: {
                float v;
                std::memcpy(&v, buf, 4);
                return v;
            }
            case PlyScalar::Double: {
                double v;
                std::memcpy(&v, buf, 8);
                return v;
            }
        }
        return 0.0;
    }

    std::istream& in_;
    bool binary_;
    const std::filesystem::path& path_;
};

TriangleMesh load_ply(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());

    std::string line;
    int line_no = 0;
    auto next_line = [&]() {
        if (!std::getline(in, line)) parse_fail(path, line_no, "unexpected end of header");
        if (!line.empty() && line.back() == '\r') line.pop_back();
        ++line_no;
    };

    next_line();
    if (line != "ply") parse_fail(path, line_no, "missing 'ply' magic");

    bool binary = false;
    std::vector<PlyElement> elements;
    for (;;) {
        next_line();
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "comment" || tag == "obj_info" || tag.empty()) continue;
        if (tag == "format") {
            std::string fmt, version;
            ss >> fmt >> version;
            if (fmt == "ascii") {
                binary = false;
            } else if (fmt == "binary_little_endian") {
                binary = true;
            } else {
                parse_fail(path, line_no, "unsupported PLY format '" + fmt + "'");
            }
        } else if (tag == "element") {
            PlyElement el;
            if (!(ss >> el.name >> el.count)) parse_fail(path, line_no, "malformed element record");
            elements.push_back(el);
        } else if (tag == "property") {
            if (elements.empty()) parse_fail(path, line_no, "property before any element");
            PlyProperty prop;
            std::string type_name;
            ss >> type_name;
            if (type_name == "list") {
                prop.is_list = true;
                std::string count_name, value_name;
                if (!(ss >> count_name >> value_name >> prop.name)) {
                    parse_fail(path, line_no, "malformed list property");
                }
                prop.count_type = ply_scalar_from_name(count_name, path, line_no);
                prop.value_type = ply_scalar_from_name(value_name, path, line_no);
            } else {
                if (!(ss >> prop.name)) parse_fail(path, line_no, "malformed property record");
                prop.value_type = ply_scalar_from_name(type_name, path, line_no);
            }
            elements.back().properties.push_back(prop);
        } else if (tag == "end_header") {
            break;
        } else {
            parse_fail(path, line_no, "unrecognized header record '" + tag + "'");
        }
    }

    TriangleMesh mesh;
    PlyReader reader(in, binary, path);
    for (const auto& el : elements) {
        if (el.name == "vertex") {
            int ix = -1, iy = -1, iz = -1;
            std::vector<int> channel_props;
            for (std::size_t p = 0; p < el.properties.size(); ++p) {
                const auto& prop = el.properties[p];
                if (prop.is_list) parse_fail(path, line_no, "list property on vertex element");
                if (prop.name == "x") {
                    ix = static_cast<int>(p);
                } else if (prop.name == "y") {
                    iy = static_cast<int>(p);
                } else if (prop.name == "z") {
                    iz = static_cast<int>(p);
                } else {
                    channel_props.push_back(static_cast<int>(p));
                }
            }
            if (ix < 0 || iy < 0 || iz < 0) parse_fail(path, line_no, "vertex element lacks x/y/z");
            std::vector<Eigen::VectorXd> channels(channel_props.size());
            for (auto& c : channels) c.resize(static_cast<Eigen::Index>(el.count));
            mesh.vertices.reserve(el.count);
            std::vector<double> row(el.properties.size());
            for (std::size_t v = 0; v < el.count; ++v) {
                for (std::size_t p = 0; p < el.properties.size(); ++p) {
                    row[p] = reader.read_scalar(el.properties[p].value_type);
                }
                mesh.vertices.emplace_back(row[static_cast<std::size_t>(ix)],
                                           row[static_cast<std::size_t>(iy)],
                                           row[static_cast<std::size_t>(iz)]);
                for (std::size_t c = 0; c < channel_props.size(); ++c) {
                    channels[c][static_cast<Eigen::Index>(v)] = row[static_cast<std::size_t>(channel_props[c])];
                }
            }
            for (std::size_t c = 0; c < channel_props.size(); ++c) {
                mesh.channels.emplace(el.properties[static_cast<std::size_t>(channel_props[c])].name,
                                      std::move(channels[c]));
            }
        } else if (el.name == "face") {
            mesh.faces.reserve(el.count);
            for (std::size_t f = 0; f < el.count; ++f) {
                for (const auto& prop : el.properties) {
                    if (prop.is_list) {
                        int count = static_cast<int>(reader.read_scalar(prop.count_type));
                        std::vector<int> corners(static_cast<std::size_t>(count));
                        for (auto& c : corners) c = static_cast<int>(reader.read_scalar(prop.value_type));
                        if (prop.name == "vertex_indices" || prop.name == "vertex_index") {
                            if (count < 3) throw IoError(path.string() + ": face with fewer than 3 corners");
                            for (std::size_t c = 1; c + 1 < corners.size(); ++c) {
                                mesh.faces.push_back({corners[0], corners[c], corners[c + 1]});
                            }
                        }
                    } else {
                        reader.read_scalar(prop.value_type);
                    }
                }
            }
        } else {
            // Skip unknown elements property by property.
            for (std::size_t i = 0; i < el.count; ++i) {
                for (const auto& prop : el.properties) {
                    if (prop.is_list) {
                        int count = static_cast<int>(reader.read_scalar(prop.count_type));
                        for (int c = 0; c < count; ++c) reader.read_scalar(prop.value_type);
                    } else {
                        reader.read_scalar(prop.value_type);
                    }
                }
            }
        }
    }
    return mesh;
}

}  // namespace

MeshFormat mesh_format_from_path(const std::filesystem::path& path) {
    std::string ext = lower(path.extension().string());
    if (ext == ".obj") return MeshFormat::Obj;
    if (ext == ".ply") return MeshFormat::Ply;
    throw ConfigError("cannot infer mesh format from '" + path.string() + "' (expected .obj or .ply)");
}

TriangleMesh load_mesh(const std::filesystem::path& path, std::optional<MeshFormat> format) {
    if (!std::filesystem::exists(path)) throw IoError("mesh file not found: " + path.string());
    MeshFormat fmt = format ? *format : mesh_format_from_path(path);
    TriangleMesh raw = fmt == MeshFormat::Obj ? load_obj(path) : load_ply(path);
    TriangleMesh mesh = validate_mesh(std::move(raw));
    for (const auto& w : mesh.warnings) log_warning(path.filename().string() + ": " + w);
    return mesh;
}

void save_ply(const std::filesystem::path& path, const TriangleMesh& mesh) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "ply\nformat ascii 1.0\n";
    out << "element vertex " << mesh.vertex_count() << "\n";
    out << "property double x\nproperty double y\nproperty double z\n";
    for (const auto& [name, values] : mesh.channels) {
        out << "property double " << name << "\n";
    }
    out << "element face " << mesh.face_count() << "\n";
    out << "property list uchar int vertex_indices\n";
    out << "end_header\n";
    out.precision(17);
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        const auto& p = mesh.vertices[static_cast<std::size_t>(v)];
        out << p.x() << " " << p.y() << " " << p.z();
        for (const auto& [name, values] : mesh.channels) out << " " << values[v];
        out << "\n";
    }
    for (const auto& f : mesh.faces) {
        out << "3 " << f[0] << " " << f[1] << " " << f[2] << "\n";
    }
    if (!out) throw IoError("failed while writing " + path.string());
}

}  // namespace ergomesh
