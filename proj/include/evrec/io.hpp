#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "evrec/deblur.hpp"
#include "evrec/events.hpp"
#include "evrec/image.hpp"
#include "evrec/synth.hpp"

namespace evrec::io {

// --- images -----------------------------------------------------------
// Grayscale rasters map linearly to [0,1]. PGM is binary P5 (8- or 16-bit,
// big-endian sample order); PNG is 8-bit grayscale.

Image read_pgm(const std::filesystem::path& path);
void write_pgm(const Image& image, const std::filesystem::path& path, int bits = 16);

Image read_png(const std::filesystem::path& path);
void write_png(const Image& image, const std::filesystem::path& path);

// Dispatch on the file extension (.pgm or .png).
Image read_image(const std::filesystem::path& path);
void write_image(const Image& image, const std::filesystem::path& path);

// --- event text format -------------------------------------------------
// One event per line: `t_us,x,y,p` with p in {-1,1} or {0,1} (0 maps to -1).
// An optional leading `# width,height` line carries the geometry; otherwise
// pass it explicitly.

events::EventStream read_events(const std::filesystem::path& path,
                                int width = 0, int height = 0);
void write_events(const events::EventStream& stream, const std::filesystem::path& path);

// `t_us,x,y,p,label` with label 1 = signal, 0 = noise.
synth::LabeledStream read_labeled(const std::filesystem::path& path,
                                  int width = 0, int height = 0);
void write_labeled(const synth::LabeledStream& labeled, const std::filesystem::path& path);

// Per-event keep flags for a filtering pass: `t_us,x,y,p,kept`. `kept` must
// be an in-order sub-sequence of `raw`.
void write_kept_flags(const events::EventStream& raw, const events::EventStream& kept,
                      const std::filesystem::path& path);

// --- kernels -----------------------------------------------------------
void write_kernel_txt(const deblur::BlurKernel& k, const std::filesystem::path& path);
deblur::BlurKernel read_kernel_txt(const std::filesystem::path& path);
// 8-bit visualization normalized to the max weight.
void write_kernel_pgm(const deblur::BlurKernel& k, const std::filesystem::path& path);

// --- key=value metadata --------------------------------------------------
void write_meta(const std::map<std::string, std::string>& meta,
                const std::filesystem::path& path);
std::map<std::string, std::string> read_meta(const std::filesystem::path& path);

// Fixture bundle: <dir>/{sharp.pgm, blurry.pgm, events.csv, labels.csv, meta.txt}.
void write_case(const synth::CaseBundle& bundle, const std::filesystem::path& dir);

}  // namespace evrec::io
