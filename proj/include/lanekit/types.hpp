#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace lanekit {

using ElementId = std::int64_t;

enum class LaneType { kVehicle, kBike, kBus };

enum class MarkType {
  kSolid,
  kDashed,
  kDoubleSolid,
  kDoubleDashed,
  kDashSolid,
  kSolidDash,
  kNone,
  kUnknown,
};

enum class MarkColor { kWhite, kYellow, kBlue, kNonVisible };

struct LaneMarkType {
  MarkType mark = MarkType::kNone;
  MarkColor color = MarkColor::kNonVisible;

  bool operator==(const LaneMarkType&) const = default;

  // A boundary with no painted marking is "implicit"; generators leave
  // those untouched.
  bool painted() const { return mark != MarkType::kNone; }
};

std::string_view to_string(LaneType t);
std::string_view to_string(MarkType t);
std::string_view to_string(MarkColor c);

std::optional<LaneType> lane_type_from_string(std::string_view s);
std::optional<MarkType> mark_type_from_string(std::string_view s);
std::optional<MarkColor> mark_color_from_string(std::string_view s);

// Change-tag strings recorded in an element's change_hist.
namespace tag {
inline constexpr std::string_view kGeometry = "geometry";
inline constexpr std::string_view kMarking = "marking";
inline constexpr std::string_view kType = "type";
inline constexpr std::string_view kConnectivity = "connectivity";
inline constexpr std::string_view kInsertion = "insertion";
inline constexpr std::string_view kDeletion = "deletion";
inline constexpr std::string_view kReroute = "reroute";
}  // namespace tag

bool is_valid_change_tag(std::string_view s);

}  // namespace lanekit
