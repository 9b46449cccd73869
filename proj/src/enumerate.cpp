#include <json.hpp>
#include <sstream>

#include "dvkit/genkit.hpp"

namespace dvkit::genkit {

using taskspec::Primitive;
using taskspec::PrimitiveKind;
using taskspec::PredicateSequence;

namespace {

PredicateSequence seq(std::initializer_list<Primitive> p) { return PredicateSequence{p}; }

Primitive prim(PrimitiveKind k) { return {k, ""}; }
Primitive custom(std::string label) { return {PrimitiveKind::kCustom, std::move(label)}; }

[[noreturn]] void config_error(const std::string& lab, const std::string& what) {
  throw Error("ConfigError", "lab '" + lab + "': " + what);
}

}  // namespace

void LabConfig::validate() const {
  if (id.empty()) config_error(id, "empty id");
  if (objects.size() != kObjectsPerLab)
    config_error(id, "object roster has " + std::to_string(objects.size()) + " entries, expected " +
                         std::to_string(kObjectsPerLab));
  if (openables.size() != kOpenablesPerLab)
    config_error(id, "receptacle roster has " + std::to_string(openables.size()) +
                         " entries, expected " + std::to_string(kOpenablesPerLab));
  if (camera_bins.size() != kCameraBinsPerLab)
    config_error(id, "expected " + std::to_string(kCameraBinsPerLab) + " camera bins, got " +
                         std::to_string(camera_bins.size()));
  if (spatial_combinations == 0) config_error(id, "no spatial combinations");
}

std::vector<LabConfig> LabConfig::defaults() {
  const std::vector<std::string> bins{"agent-front", "agent-left", "agent-right", "shoulder-left",
                                      "shoulder-right"};
  const std::vector<std::vector<std::string>> rosters{
      {"carrot", "bowl", "mug", "banana", "apple", "marker", "sponge"},
      {"teapot", "cup", "lemon", "spoon", "plate", "corn", "ketchup"},
      {"bowl", "carrot", "cheese", "mug", "orange", "tomato", "bread"},
      {"apple", "marker", "can", "pear", "cup", "milk", "butter"},
      {"coffee pod", "mug", "banana", "bowl", "cookie", "spoon", "teapot"},
      {"carrot", "lemon", "plate", "egg", "pepper", "cup", "sponge"},
      {"ketchup", "bowl", "corn", "apple", "knife", "mug", "onion"},
      {"teapot", "marker", "bread", "can", "banana", "potato", "cheese"}};
  std::vector<LabConfig> labs;
  for (std::size_t i = 0; i < rosters.size(); ++i) {
    LabConfig c;
    c.id = "lab" + std::to_string(i + 1);
    c.objects = rosters[i];
    c.openables = {"drawer", "microwave"};
    c.has_coffee_machine = i == 4;
    c.camera_bins = bins;
    labs.push_back(std::move(c));
  }
  return labs;
}

const std::vector<std::string>& template_names() {
  static const std::vector<std::string> names{
      "pick-place-bin", "open",           "close",           "open-pick-place",
      "pick-place-close", "turn-on-stove", "turn-off-stove", "make-coffee"};
  return names;
}

Enumeration enumerate_instances(std::span<const LabConfig> labs) {
  Enumeration out;
  for (const LabConfig& lab : labs) {
    lab.validate();
    LabEnumeration e;
    e.lab = lab.id;
    for (const auto& name : template_names()) e.template_counts[name] = 0;
    auto add = [&](std::string tmpl, std::string instruction, PredicateSequence goal,
                   std::optional<std::string> object, std::optional<std::string> receptacle) {
      ++e.template_counts[tmpl];
      e.tasks.push_back({lab.id, std::move(tmpl), std::move(instruction), std::move(goal),
                         std::move(object), std::move(receptacle)});
    };
    const auto pick = prim(PrimitiveKind::kPick), place = prim(PrimitiveKind::kPlace);
    const auto open = prim(PrimitiveKind::kOpen), close = prim(PrimitiveKind::kClose);

    for (const auto& x : lab.objects)
      add("pick-place-bin", "pick the " + x + " and place it in the bin", seq({pick, place}), x,
          "bin");
    for (const auto& y : lab.openables) add("open", "open the " + y, seq({open}), std::nullopt, y);
    for (const auto& y : lab.openables) add("close", "close the " + y, seq({close}), std::nullopt, y);
    for (const auto& y : lab.openables)
      for (const auto& x : lab.objects)
        add("open-pick-place", "open the " + y + ", pick the " + x + " and place it in the " + y,
            seq({open, pick, place}), x, y);
    for (const auto& y : lab.openables)
      for (const auto& x : lab.objects)
        add("pick-place-close",
            "pick the " + x + ", place it in the " + y + " and close the " + y,
            seq({pick, place, close}), x, y);
    if (lab.has_stove) {
      add("turn-on-stove", "turn on the stove", seq({custom("turnOn")}), std::nullopt, "stove");
      add("turn-off-stove", "turn off the stove", seq({custom("turnOff")}), std::nullopt, "stove");
    }
    if (lab.has_coffee_machine)
      add("make-coffee",
          "pick up the coffee pod, place it in the coffee machine and close its lid",
          seq({pick, place, close}), "coffee pod", "coffee machine");

    e.variations = lab.camera_bins.size() * lab.spatial_combinations;
    out.total_tasks += e.tasks.size();
    out.total_variations += e.variations;
    out.labs.push_back(std::move(e));
  }
  return out;
}

std::string enumeration_text(const Enumeration& e) {
  std::ostringstream os;
  for (const auto& lab : e.labs) {
    os << lab.lab << ": tasks " << lab.tasks.size() << ", variations " << lab.variations << "\n";
    for (const auto& name : template_names())
      os << "  " << name << " " << lab.template_counts.at(name) << "\n";
  }
  os << "total tasks: " << e.total_tasks << "\ntotal variations: " << e.total_variations << "\n";
  return os.str();
}

std::string enumeration_json(const Enumeration& e) {
  nlohmann::json j;
  j["total_tasks"] = e.total_tasks;
  j["total_variations"] = e.total_variations;
  j["labs"] = nlohmann::json::array();
  for (const auto& lab : e.labs) {
    nlohmann::json l{{"lab", lab.lab},
                     {"variations", lab.variations},
                     {"template_counts", lab.template_counts},
                     {"tasks", nlohmann::json::array()}};
    for (const auto& t : lab.tasks) {
      std::vector<std::string> goal;
      for (const auto& p : t.goal.primitives) goal.push_back(p.name());
      nlohmann::json tj{{"template", t.template_name}, {"instruction", t.instruction}, {"goal", goal}};
      tj["object"] = t.object ? nlohmann::json(*t.object) : nlohmann::json(nullptr);
      tj["receptacle"] = t.receptacle ? nlohmann::json(*t.receptacle) : nlohmann::json(nullptr);
      l["tasks"].push_back(std::move(tj));
    }
    j["labs"].push_back(std::move(l));
  }
  return j.dump();
}

}  // namespace dvkit::genkit
