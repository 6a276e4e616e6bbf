#include "btd/nifti.hpp"

#include <zlib.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace btd {

namespace {

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ParseError(path + ": cannot open file");
    f.seekg(0, std::ios::end);
    const auto size = static_cast<std::size_t>(f.tellg());
    f.seekg(0, std::ios::beg);
    std::vector<std::uint8_t> buf(size);
    f.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(size));
    if (!f) throw ParseError(path + ": short read");
    return buf;
}

bool is_gzip(const std::vector<std::uint8_t>& buf) {
    return buf.size() >= 2 && buf[0] == 0x1f && buf[1] == 0x8b;
}

std::vector<std::uint8_t> gunzip(const std::vector<std::uint8_t>& in,
                                 const std::string& path) {
    z_stream zs{};
    if (inflateInit2(&zs, 15 + 16) != Z_OK)
        throw ParseError(path + ": inflateInit failed");
    std::vector<std::uint8_t> out;
    out.reserve(in.size() * 4);
    std::uint8_t chunk[1 << 16];
    zs.next_in = const_cast<Bytef*>(in.data());
    zs.avail_in = static_cast<uInt>(in.size());
    int rc = Z_OK;
    while (rc != Z_STREAM_END) {
        zs.next_out = chunk;
        zs.avail_out = sizeof(chunk);
        rc = inflate(&zs, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            inflateEnd(&zs);
            throw ParseError(path + ": gzip stream corrupt (zlib rc " +
                             std::to_string(rc) + ")");
        }
        out.insert(out.end(), chunk, chunk + (sizeof(chunk) - zs.avail_out));
    }
    inflateEnd(&zs);
    return out;
}

std::vector<std::uint8_t> gzip_compress(const std::vector<std::uint8_t>& in) {
    z_stream zs{};
    if (deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 15 + 16, 8,
                     Z_DEFAULT_STRATEGY) != Z_OK)
        throw ParseError("deflateInit failed");
    std::vector<std::uint8_t> out;
    std::uint8_t chunk[1 << 16];
    zs.next_in = const_cast<Bytef*>(in.data());
    zs.avail_in = static_cast<uInt>(in.size());
    int rc = Z_OK;
    while (rc != Z_STREAM_END) {
        zs.next_out = chunk;
        zs.avail_out = sizeof(chunk);
        rc = deflate(&zs, Z_FINISH);
        out.insert(out.end(), chunk, chunk + (sizeof(chunk) - zs.avail_out));
    }
    deflateEnd(&zs);
    return out;
}

void bswap2(void* p) {
    auto* b = static_cast<std::uint8_t*>(p);
    std::swap(b[0], b[1]);
}
void bswap4(void* p) {
    auto* b = static_cast<std::uint8_t*>(p);
    std::swap(b[0], b[3]);
    std::swap(b[1], b[2]);
}

void swap_header(NiftiHeader& h) {
    bswap4(&h.sizeof_hdr);
    bswap4(&h.extents);
    bswap2(&h.session_error);
    for (auto& d : h.dim) bswap2(&d);
    bswap4(&h.intent_p1);
    bswap4(&h.intent_p2);
    bswap4(&h.intent_p3);
    bswap2(&h.intent_code);
    bswap2(&h.datatype);
    bswap2(&h.bitpix);
    bswap2(&h.slice_start);
    for (auto& d : h.pixdim) bswap4(&d);
    bswap4(&h.vox_offset);
    bswap4(&h.scl_slope);
    bswap4(&h.scl_inter);
    bswap2(&h.slice_end);
    bswap4(&h.cal_max);
    bswap4(&h.cal_min);
    bswap4(&h.slice_duration);
    bswap4(&h.toffset);
    bswap4(&h.glmax);
    bswap4(&h.glmin);
    bswap2(&h.qform_code);
    bswap2(&h.sform_code);
    bswap4(&h.quatern_b);
    bswap4(&h.quatern_c);
    bswap4(&h.quatern_d);
    bswap4(&h.qoffset_x);
    bswap4(&h.qoffset_y);
    bswap4(&h.qoffset_z);
    for (auto& v : h.srow_x) bswap4(&v);
    for (auto& v : h.srow_y) bswap4(&v);
    for (auto& v : h.srow_z) bswap4(&v);
}

// Axis roles from the sform rotation: voxel axis j maps to the anatomical
// axis with the dominant |component| of sform column j (RAS convention:
// row 0 = LR, row 1 = AP, row 2 = SI).
std::optional<AxisRoles> roles_from_sform(const NiftiHeader& h) {
    if (h.sform_code <= 0) return std::nullopt;
    const float* rows[3] = {h.srow_x, h.srow_y, h.srow_z};
    AxisRoles out;
    bool taken[3] = {false, false, false};
    for (int col = 0; col < 3; ++col) {
        int best = 0;
        double best_abs = -1.0;
        for (int row = 0; row < 3; ++row) {
            const double a = std::fabs(rows[row][col]);
            if (a > best_abs) {
                best_abs = a;
                best = row;
            }
        }
        if (best_abs <= 0.0 || taken[best]) return std::nullopt;  // degenerate
        taken[best] = true;
        out.role[col] = static_cast<AxisRole>(best);
    }
    return out;
}

}  // namespace

NiftiVolume read_nifti(const std::string& path,
                       std::optional<AxisRoles> roles_override) {
    auto raw = read_file(path);
    if (is_gzip(raw)) raw = gunzip(raw, path);
    if (raw.size() < sizeof(NiftiHeader))
        throw ParseError(path + ": file shorter than the 348-byte header");

    NiftiHeader h;
    std::memcpy(&h, raw.data(), sizeof(h));
    bool swapped = false;
    if (h.sizeof_hdr != 348) {
        swap_header(h);
        swapped = true;
        if (h.sizeof_hdr != 348)
            throw ParseError(path + ": sizeof_hdr at offset 0 is not 348 in either byte order");
    }
    if (std::memcmp(h.magic, "n+1", 4) != 0) {
        if (std::memcmp(h.magic, "ni1", 4) == 0)
            throw ParseError(path + ": two-file NIfTI (magic \"ni1\" at offset 344) is not supported");
        throw ParseError(path + ": bad magic at offset 344");
    }
    const bool pseudo_4d = h.dim[0] == 4 && h.dim[4] == 1;
    if (h.dim[0] != 3 && !pseudo_4d)
        throw ParseError(path + ": not a 3D volume (dim[0] = " +
                         std::to_string(h.dim[0]) + " at offset 40)");
    const int nx = h.dim[1], ny = h.dim[2], nz = h.dim[3];
    if (nx <= 0 || ny <= 0 || nz <= 0)
        throw ParseError(path + ": non-positive dimensions at offset 40");

    int elem = 0;
    switch (h.datatype) {
        case kNiftiUint8: elem = 1; break;
        case kNiftiInt16:
        case kNiftiUint16: elem = 2; break;
        case kNiftiFloat32: elem = 4; break;
        case kNiftiFloat64: elem = 8; break;
        default:
            throw ParseError(path + ": unsupported datatype " +
                             std::to_string(h.datatype) + " at offset 70");
    }

    const std::size_t nvox = static_cast<std::size_t>(nx) * ny * nz;
    const std::size_t offset = static_cast<std::size_t>(h.vox_offset);
    if (offset < 348 || offset + nvox * elem > raw.size())
        throw ParseError(path + ": data range (vox_offset " + std::to_string(offset) +
                         ") exceeds file size " + std::to_string(raw.size()));

    NiftiVolume out;
    out.header = h;
    out.vol = Volume3(nx, ny, nz);
    const std::uint8_t* src = raw.data() + offset;
    const float slope = (h.scl_slope != 0.0f) ? h.scl_slope : 1.0f;
    const float inter = (h.scl_slope != 0.0f) ? h.scl_inter : 0.0f;

    for (std::size_t i = 0; i < nvox; ++i) {
        double v = 0.0;
        switch (h.datatype) {
            case kNiftiUint8: v = src[i]; break;
            case kNiftiInt16: {
                std::int16_t t;
                std::memcpy(&t, src + 2 * i, 2);
                if (swapped) bswap2(&t);
                v = t;
                break;
            }
            case kNiftiUint16: {
                std::uint16_t t;
                std::memcpy(&t, src + 2 * i, 2);
                if (swapped) bswap2(&t);
                v = t;
                break;
            }
            case kNiftiFloat32: {
                float t;
                std::memcpy(&t, src + 4 * i, 4);
                if (swapped) bswap4(&t);
                v = t;
                break;
            }
            case kNiftiFloat64: {
                double t;
                std::memcpy(&t, src + 8 * i, 8);
                if (swapped) {
                    auto* b = reinterpret_cast<std::uint8_t*>(&t);
                    for (int k = 0; k < 4; ++k) std::swap(b[k], b[7 - k]);
                }
                v = t;
                break;
            }
        }
        out.vol.data[i] = static_cast<float>(v * slope + inter);
    }

    if (roles_override) {
        out.vol.roles = *roles_override;
    } else if (auto r = roles_from_sform(h)) {
        out.vol.roles = *r;
    }
    if (!out.vol.roles.valid()) throw ParseError(path + ": invalid axis role mapping");
    return out;
}

namespace {

void write_bytes(const std::string& path, std::vector<std::uint8_t> bytes) {
    if (path.size() > 3 && path.compare(path.size() - 3, 3, ".gz") == 0)
        bytes = gzip_compress(bytes);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ParseError(path + ": cannot open for writing");
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    if (!f) throw ParseError(path + ": write failed");
}

NiftiHeader geometry_header(const NiftiHeader& src, int nx, int ny, int nz,
                            std::int16_t datatype, std::int16_t bitpix) {
    NiftiHeader h;
    h.dim[0] = 3;
    h.dim[1] = static_cast<std::int16_t>(nx);
    h.dim[2] = static_cast<std::int16_t>(ny);
    h.dim[3] = static_cast<std::int16_t>(nz);
    for (int k = 4; k < 8; ++k) h.dim[k] = 1;
    h.datatype = datatype;
    h.bitpix = bitpix;
    std::memcpy(h.pixdim, src.pixdim, sizeof(h.pixdim));
    h.xyzt_units = src.xyzt_units;
    h.qform_code = src.qform_code;
    h.sform_code = src.sform_code;
    h.quatern_b = src.quatern_b;
    h.quatern_c = src.quatern_c;
    h.quatern_d = src.quatern_d;
    h.qoffset_x = src.qoffset_x;
    h.qoffset_y = src.qoffset_y;
    h.qoffset_z = src.qoffset_z;
    std::memcpy(h.srow_x, src.srow_x, sizeof(h.srow_x));
    std::memcpy(h.srow_y, src.srow_y, sizeof(h.srow_y));
    std::memcpy(h.srow_z, src.srow_z, sizeof(h.srow_z));
    return h;
}

}  // namespace

void write_nifti_mask(const std::string& path, const BinaryMask3& mask,
                      const NiftiHeader& source_header) {
    if (mask.nx != source_header.dim[1] || mask.ny != source_header.dim[2] ||
        mask.nz != source_header.dim[3])
        throw InvalidArgument("write_nifti_mask: mask dims do not match source header");
    NiftiHeader h = geometry_header(source_header, mask.nx, mask.ny, mask.nz,
                                    kNiftiUint8, 8);
    std::vector<std::uint8_t> bytes(sizeof(h) + 4 + mask.size());
    std::memcpy(bytes.data(), &h, sizeof(h));
    for (std::size_t i = 0; i < mask.size(); ++i)
        bytes[352 + i] = mask.data[i] ? 1 : 0;
    write_bytes(path, std::move(bytes));
}

void write_nifti_volume(const std::string& path, const Volume3& vol) {
    NiftiHeader src;  // identity geometry
    src.pixdim[0] = 1.0f;
    for (int k = 1; k < 8; ++k) src.pixdim[k] = 1.0f;
    NiftiHeader h = geometry_header(src, vol.nx, vol.ny, vol.nz, kNiftiFloat32, 32);
    std::vector<std::uint8_t> bytes(sizeof(h) + 4 + vol.size() * 4);
    std::memcpy(bytes.data(), &h, sizeof(h));
    std::memcpy(bytes.data() + 352, vol.data.data(), vol.size() * 4);
    write_bytes(path, std::move(bytes));
}

}  // namespace btd
