#include <charconv>
#include <fstream>
#include <vector>

#include "evrec/io.hpp"

namespace evrec::io {

namespace {

struct ParsedLine {
  int64_t fields[5] = {0, 0, 0, 0, 0};
  int count = 0;
};

bool parse_csv_ints(const std::string& line, ParsedLine& out) {
  out.count = 0;
  const char* p = line.data();
  const char* end = p + line.size();
  while (p < end && out.count < 5) {
    int64_t v = 0;
    auto [next, ec] = std::from_chars(p, end, v);
    if (ec != std::errc()) return false;
    out.fields[out.count++] = v;
    p = next;
    if (p < end) {
      if (*p != ',') return false;
      ++p;
    }
  }
  return p == end && out.count > 0;
}

int map_polarity(int64_t p) {
  if (p == 1) return 1;
  if (p == -1 || p == 0) return -1;
  throw IoError("event polarity must be -1, 0 or 1");
}

// Reads `t,x,y,p[,extra]` lines; a `# w,h` comment line sets the geometry.
void read_event_lines(const std::filesystem::path& path, int& width, int& height,
                      std::vector<events::Event>& out_events,
                      std::vector<uint8_t>* out_extra, bool want_extra) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  size_t lineno = 0;
  bool have_geometry = width > 0 && height > 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      ParsedLine header;
      std::string body = line.substr(1);
      size_t start = body.find_first_not_of(" \t");
      if (start != std::string::npos && parse_csv_ints(body.substr(start), header) &&
          header.count == 2 && !have_geometry) {
        width = static_cast<int>(header.fields[0]);
        height = static_cast<int>(header.fields[1]);
        have_geometry = true;
      }
      continue;
    }
    ParsedLine parsed;
    if (!parse_csv_ints(line, parsed) || parsed.count < 4) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": malformed event line");
    }
    events::Event e;
    e.t = parsed.fields[0];
    e.x = static_cast<int>(parsed.fields[1]);
    e.y = static_cast<int>(parsed.fields[2]);
    e.p = map_polarity(parsed.fields[3]);
    out_events.push_back(e);
    if (want_extra) {
      if (parsed.count < 5) {
        throw IoError(path.string() + ":" + std::to_string(lineno) + ": missing label field");
      }
      out_extra->push_back(parsed.fields[4] != 0 ? 1 : 0);
    }
  }
  if (!have_geometry) {
    throw IoError(path.string() + ": no geometry header and none supplied");
  }
}

}  // namespace

events::EventStream read_events(const std::filesystem::path& path, int width, int height) {
  std::vector<events::Event> raw;
  read_event_lines(path, width, height, raw, nullptr, false);
  return events::EventStream::from_unsorted(width, height, std::move(raw));
}

void write_events(const events::EventStream& stream, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "# " << stream.width() << "," << stream.height() << "\n";
  for (const events::Event& e : stream) {
    out << e.t << "," << e.x << "," << e.y << "," << e.p << "\n";
  }
  if (!out) throw IoError("failed writing " + path.string());
}

synth::LabeledStream read_labeled(const std::filesystem::path& path, int width, int height) {
  std::vector<events::Event> raw;
  std::vector<uint8_t> labels;
  read_event_lines(path, width, height, raw, &labels, true);
  // keep event/label alignment: the text format stores streams already sorted
  synth::LabeledStream out;
  out.stream = events::EventStream(width, height);
  for (const events::Event& e : raw) out.stream.append(e);
  out.labels = std::move(labels);
  return out;
}

void write_labeled(const synth::LabeledStream& labeled, const std::filesystem::path& path) {
  if (labeled.labels.size() != labeled.stream.size()) {
    throw ConsistencyError("label count does not match stream");
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "# " << labeled.stream.width() << "," << labeled.stream.height() << "\n";
  for (size_t i = 0; i < labeled.stream.size(); ++i) {
    const events::Event& e = labeled.stream[i];
    out << e.t << "," << e.x << "," << e.y << "," << e.p << ","
        << static_cast<int>(labeled.labels[i]) << "\n";
  }
  if (!out) throw IoError("failed writing " + path.string());
}

void write_kept_flags(const events::EventStream& raw, const events::EventStream& kept,
                      const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "# " << raw.width() << "," << raw.height() << "\n";
  size_t j = 0;
  for (size_t i = 0; i < raw.size(); ++i) {
    const bool was_kept = j < kept.size() && kept[j] == raw[i];
    if (was_kept) ++j;
    const events::Event& e = raw[i];
    out << e.t << "," << e.x << "," << e.y << "," << e.p << "," << (was_kept ? 1 : 0)
        << "\n";
  }
  if (j != kept.size()) {
    throw ConsistencyError("kept stream is not a sub-sequence of the raw stream");
  }
  if (!out) throw IoError("failed writing " + path.string());
}

void write_meta(const std::map<std::string, std::string>& meta,
                const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& [k, v] : meta) out << k << "=" << v << "\n";
  if (!out) throw IoError("failed writing " + path.string());
}

std::map<std::string, std::string> read_meta(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::map<std::string, std::string> meta;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) throw IoError("malformed meta line: " + line);
    meta[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return meta;
}

void write_case(const synth::CaseBundle& bundle, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_pgm(bundle.sharp, dir / "sharp.pgm");
  write_pgm(bundle.blurry, dir / "blurry.pgm");
  write_events(bundle.labeled.stream, dir / "events.csv");
  write_labeled(bundle.labeled, dir / "labels.csv");
  write_kernel_txt(bundle.kernel, dir / "kernel.txt");
  write_meta(bundle.meta, dir / "meta.txt");
}

}  // namespace evrec::io
