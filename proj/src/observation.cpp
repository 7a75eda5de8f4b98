#include "observation.hpp"

#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace ofdr {

namespace {

using nlohmann::json;

void put_f32(uint8_t* p, float v) { std::memcpy(p, &v, 4); }
void put_f64(uint8_t* p, double v) { std::memcpy(p, &v, 8); }
void put_u32(uint8_t* p, uint32_t v) { std::memcpy(p, &v, 4); }
void put_u64(uint8_t* p, uint64_t v) { std::memcpy(p, &v, 8); }
float get_f32(const uint8_t* p) {
    float v;
    std::memcpy(&v, p, 4);
    return v;
}
double get_f64(const uint8_t* p) {
    double v;
    std::memcpy(&v, p, 8);
    return v;
}
uint32_t get_u32(const uint8_t* p) {
    uint32_t v;
    std::memcpy(&v, p, 4);
    return v;
}
uint64_t get_u64(const uint8_t* p) {
    uint64_t v;
    std::memcpy(&v, p, 8);
    return v;
}

}  // namespace

std::string observation_to_json(const RepeaterObservation& o) {
    json j;
    j["k"] = o.repeater;
    j["sweep_index"] = o.sweep_index;
    j["timestamp"] = o.timestamp_s;
    j["jones"] = {o.jones.xx.real(), o.jones.xx.imag(), o.jones.xy.real(), o.jones.xy.imag(),
                  o.jones.yx.real(), o.jones.yx.imag(), o.jones.yy.real(), o.jones.yy.imag()};
    j["delay_est"] = o.delay_est_s;
    j["delay_nominal"] = o.delay_nominal_s;
    j["intensity_db"] = o.intensity_db;
    j["snr_db"] = o.snr_db;
    j["meas_bandwidth_hz"] = o.meas_bandwidth_hz;
    j["flags"] = o.flags;
    return j.dump();
}

RepeaterObservation observation_from_json(const std::string& line) {
    json j = json::parse(line);
    RepeaterObservation o;
    o.repeater = j.at("k").get<uint32_t>();
    o.sweep_index = j.at("sweep_index").get<uint64_t>();
    o.timestamp_s = j.at("timestamp").get<double>();
    const auto& m = j.at("jones");
    o.jones.xx = cplx{m.at(0).get<double>(), m.at(1).get<double>()};
    o.jones.xy = cplx{m.at(2).get<double>(), m.at(3).get<double>()};
    o.jones.yx = cplx{m.at(4).get<double>(), m.at(5).get<double>()};
    o.jones.yy = cplx{m.at(6).get<double>(), m.at(7).get<double>()};
    o.delay_est_s = j.at("delay_est").get<double>();
    o.delay_nominal_s = j.value("delay_nominal", 0.0);
    o.intensity_db = j.at("intensity_db").get<double>();
    o.snr_db = j.at("snr_db").get<double>();
    o.meas_bandwidth_hz = j.value("meas_bandwidth_hz", 0.0);
    o.flags = j.at("flags").get<uint32_t>();
    return o;
}

void observation_to_binary(const RepeaterObservation& o, uint8_t out[kObservationRecordBytes]) {
    std::memset(out, 0, kObservationRecordBytes);
    put_u64(out + 0, o.sweep_index);
    put_f64(out + 8, o.timestamp_s);
    put_u32(out + 16, o.repeater);
    put_u32(out + 20, o.flags);
    put_f32(out + 24, static_cast<float>(o.jones.xx.real()));
    put_f32(out + 28, static_cast<float>(o.jones.xx.imag()));
    put_f32(out + 32, static_cast<float>(o.jones.xy.real()));
    put_f32(out + 36, static_cast<float>(o.jones.xy.imag()));
    put_f32(out + 40, static_cast<float>(o.jones.yx.real()));
    put_f32(out + 44, static_cast<float>(o.jones.yx.imag()));
    put_f32(out + 48, static_cast<float>(o.jones.yy.real()));
    put_f32(out + 52, static_cast<float>(o.jones.yy.imag()));
    put_f64(out + 56, o.delay_est_s);
    put_f64(out + 64, o.delay_nominal_s);
    put_f32(out + 72, static_cast<float>(o.intensity_db));
    put_f32(out + 76, static_cast<float>(o.snr_db));
    put_f32(out + 80, static_cast<float>(o.meas_bandwidth_hz));
}

RepeaterObservation observation_from_binary(const uint8_t in[kObservationRecordBytes]) {
    RepeaterObservation o;
    o.sweep_index = get_u64(in + 0);
    o.timestamp_s = get_f64(in + 8);
    o.repeater = get_u32(in + 16);
    o.flags = get_u32(in + 20);
    o.jones.xx = cplx{get_f32(in + 24), get_f32(in + 28)};
    o.jones.xy = cplx{get_f32(in + 32), get_f32(in + 36)};
    o.jones.yx = cplx{get_f32(in + 40), get_f32(in + 44)};
    o.jones.yy = cplx{get_f32(in + 48), get_f32(in + 52)};
    o.delay_est_s = get_f64(in + 56);
    o.delay_nominal_s = get_f64(in + 64);
    o.intensity_db = get_f32(in + 72);
    o.snr_db = get_f32(in + 76);
    o.meas_bandwidth_hz = get_f32(in + 80);
    return o;
}

void write_observations(std::ostream& os, const std::vector<RepeaterObservation>& obs,
                        ObservationFormat fmt) {
    if (fmt == ObservationFormat::JsonLines) {
        for (const auto& o : obs) os << observation_to_json(o) << '\n';
    } else {
        uint8_t buf[kObservationRecordBytes];
        for (const auto& o : obs) {
            observation_to_binary(o, buf);
            os.write(reinterpret_cast<const char*>(buf), kObservationRecordBytes);
        }
    }
}

std::vector<RepeaterObservation> read_observations(std::istream& is, ObservationFormat fmt) {
    std::vector<RepeaterObservation> out;
    if (fmt == ObservationFormat::JsonLines) {
        std::string line;
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            out.push_back(observation_from_json(line));
        }
    } else {
        uint8_t buf[kObservationRecordBytes];
        while (is.read(reinterpret_cast<char*>(buf), kObservationRecordBytes))
            out.push_back(observation_from_binary(buf));
    }
    return out;
}

std::vector<RepeaterObservation> read_observations_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open observation file: " + path);
    const ObservationFormat fmt = path.size() > 4 && path.substr(path.size() - 4) == ".bin"
                                      ? ObservationFormat::Binary
                                      : ObservationFormat::JsonLines;
    return read_observations(f, fmt);
}

}  // namespace ofdr
