#ifndef BTD_NIFTI_HPP
#define BTD_NIFTI_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "btd/detection.hpp"

namespace btd {

// NIfTI-1 348-byte header, field-for-field.
struct NiftiHeader {
    std::int32_t sizeof_hdr = 348;
    char data_type[10] = {};
    char db_name[18] = {};
    std::int32_t extents = 0;
    std::int16_t session_error = 0;
    char regular = 'r';
    char dim_info = 0;
    std::int16_t dim[8] = {};
    float intent_p1 = 0, intent_p2 = 0, intent_p3 = 0;
    std::int16_t intent_code = 0;
    std::int16_t datatype = 0;
    std::int16_t bitpix = 0;
    std::int16_t slice_start = 0;
    float pixdim[8] = {};
    float vox_offset = 352.0f;
    float scl_slope = 1.0f;
    float scl_inter = 0.0f;
    std::int16_t slice_end = 0;
    char slice_code = 0;
    char xyzt_units = 0;
    float cal_max = 0, cal_min = 0;
    float slice_duration = 0, toffset = 0;
    std::int32_t glmax = 0, glmin = 0;
    char descrip[80] = {};
    char aux_file[24] = {};
    std::int16_t qform_code = 0, sform_code = 0;
    float quatern_b = 0, quatern_c = 0, quatern_d = 0;
    float qoffset_x = 0, qoffset_y = 0, qoffset_z = 0;
    float srow_x[4] = {}, srow_y[4] = {}, srow_z[4] = {};
    char intent_name[16] = {};
    char magic[4] = {'n', '+', '1', '\0'};
};
static_assert(sizeof(NiftiHeader) == 348, "NIfTI-1 header must be 348 bytes");

// NIfTI-1 datatype codes accepted by the reader.
enum : std::int16_t {
    kNiftiUint8 = 2,
    kNiftiInt16 = 4,
    kNiftiFloat32 = 16,
    kNiftiFloat64 = 64,
    kNiftiUint16 = 512,
};

struct NiftiVolume {
    Volume3 vol;
    NiftiHeader header;
};

// Reads a single-file NIfTI-1 volume (.nii or .nii.gz).  Endianness is
// auto-detected from sizeof_hdr; axis roles come from the sform matrix
// when present, else the RAS-like default, unless `roles_override` is
// given.  Accepted datatypes: int16, uint16, float32, float64 (uint8 is
// also read, for masks).
NiftiVolume read_nifti(const std::string& path,
                       std::optional<AxisRoles> roles_override = std::nullopt);

// Writes a 0/1 uint8 mask with geometry fields copied from the source
// header.  Gzip-compresses when the path ends in .gz.
void write_nifti_mask(const std::string& path, const BinaryMask3& mask,
                      const NiftiHeader& source_header);

// Writes a float32 volume (used by the phantom subcommand).
void write_nifti_volume(const std::string& path, const Volume3& vol);

}  // namespace btd

#endif
