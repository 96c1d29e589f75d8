#include "lanekit/types.hpp"

#include <array>

namespace lanekit {

std::string_view to_string(LaneType t) {
  switch (t) {
    case LaneType::kVehicle: return "vehicle";
    case LaneType::kBike: return "bike";
    case LaneType::kBus: return "bus";
  }
  return "vehicle";
}

std::string_view to_string(MarkType t) {
  switch (t) {
    case MarkType::kSolid: return "solid";
    case MarkType::kDashed: return "dashed";
    case MarkType::kDoubleSolid: return "double-solid";
    case MarkType::kDoubleDashed: return "double-dashed";
    case MarkType::kDashSolid: return "dash-solid";
    case MarkType::kSolidDash: return "solid-dash";
    case MarkType::kNone: return "none";
    case MarkType::kUnknown: return "unknown";
  }
  return "unknown";
}

std::string_view to_string(MarkColor c) {
  switch (c) {
    case MarkColor::kWhite: return "white";
    case MarkColor::kYellow: return "yellow";
    case MarkColor::kBlue: return "blue";
    case MarkColor::kNonVisible: return "non-visible";
  }
  return "non-visible";
}

std::optional<LaneType> lane_type_from_string(std::string_view s) {
  for (LaneType t : {LaneType::kVehicle, LaneType::kBike, LaneType::kBus}) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

std::optional<MarkType> mark_type_from_string(std::string_view s) {
  for (MarkType t :
       {MarkType::kSolid, MarkType::kDashed, MarkType::kDoubleSolid,
        MarkType::kDoubleDashed, MarkType::kDashSolid, MarkType::kSolidDash,
        MarkType::kNone, MarkType::kUnknown}) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

std::optional<MarkColor> mark_color_from_string(std::string_view s) {
  for (MarkColor c : {MarkColor::kWhite, MarkColor::kYellow, MarkColor::kBlue,
                      MarkColor::kNonVisible}) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

bool is_valid_change_tag(std::string_view s) {
  constexpr std::array<std::string_view, 7> kTags = {
      tag::kGeometry, tag::kMarking,   tag::kType,   tag::kConnectivity,
      tag::kInsertion, tag::kDeletion, tag::kReroute};
  for (auto t : kTags) {
    if (t == s) return true;
  }
  return false;
}

}  // namespace lanekit
