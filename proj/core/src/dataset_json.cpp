#include "rawkit/dataset_json.hpp"

#include <fstream>

#include <json.hpp>

#include "rawkit/error.hpp"

namespace rawkit {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("'" + path + "': " + e.what());
  }
}

void write_file(const ordered_json& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("failed writing '" + path + "'");
}

// Fetches doc[key], naming the surrounding entity on failure.
const json& require(const json& doc, const char* key, const std::string& where) {
  auto it = doc.find(key);
  if (it == doc.end())
    throw ParseError(where + ": missing key '" + key + "'");
  return *it;
}

template <typename T>
T require_as(const json& doc, const char* key, const std::string& where) {
  try {
    return require(doc, key, where).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(where + ": key '" + key + "': " + e.what());
  }
}

BBox parse_bbox(const json& doc, const std::string& where) {
  if (!doc.is_array() || doc.size() != 4)
    throw ParseError(where + ": bbox must be [x, y, w, h]");
  BBox box;
  try {
    box.x = doc[0].get<double>();
    box.y = doc[1].get<double>();
    box.w = doc[2].get<double>();
    box.h = doc[3].get<double>();
  } catch (const json::exception& e) {
    throw ParseError(where + ": bbox: " + e.what());
  }
  return box;
}

json bbox_to_json(const BBox& box) { return json::array({box.x, box.y, box.w, box.h}); }

std::string entity(const char* list, std::size_t i) {
  return std::string(list) + "[" + std::to_string(i) + "]";
}

}  // namespace

DatasetIndex load_index(const std::string& path) {
  json doc = parse_file(path);
  if (!doc.is_object()) throw ParseError("'" + path + "': top level must be an object");

  DatasetIndex index;

  const json& images = require(doc, "images", "'" + path + "'");
  for (std::size_t i = 0; i < images.size(); ++i) {
    const json& rec = images[i];
    std::string where = entity("images", i);
    ImageRecord img;
    img.id = require_as<std::int64_t>(rec, "id", where);
    img.file_path = require_as<std::string>(rec, "file_name", where);
    img.width = require_as<int>(rec, "width", where);
    img.height = require_as<int>(rec, "height", where);
    try {
      img.condition = ConditionTag::parse(require_as<std::string>(rec, "condition", where));
    } catch (const ValidationError& e) {
      throw ParseError(where + ": " + e.what());
    }
    if (auto it = rec.find("tile"); it != rec.end() && !it->is_null()) {
      TileProvenance prov;
      prov.parent_image_id = require_as<std::int64_t>(*it, "parent_image_id", where + ".tile");
      prov.x0 = require_as<int>(*it, "x0", where + ".tile");
      prov.y0 = require_as<int>(*it, "y0", where + ".tile");
      img.provenance = prov;
    }
    index.images.push_back(std::move(img));
  }

  const json& annotations = require(doc, "annotations", "'" + path + "'");
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    const json& rec = annotations[i];
    std::string where = entity("annotations", i);
    Annotation ann;
    ann.id = require_as<std::int64_t>(rec, "id", where);
    ann.image_id = require_as<std::int64_t>(rec, "image_id", where);
    ann.category_id = require_as<std::int64_t>(rec, "category_id", where);
    ann.bbox = parse_bbox(require(rec, "bbox", where), where);
    if (auto it = rec.find("iscrowd"); it != rec.end())
      ann.ignore = it->get<int>() != 0;
    index.annotations.push_back(ann);
  }

  const json& categories = require(doc, "categories", "'" + path + "'");
  for (std::size_t i = 0; i < categories.size(); ++i) {
    const json& rec = categories[i];
    std::string where = entity("categories", i);
    Category cat;
    cat.id = require_as<std::int64_t>(rec, "id", where);
    cat.name = require_as<std::string>(rec, "name", where);
    index.categories.push_back(std::move(cat));
  }

  try {
    index.validate();
  } catch (const ValidationError& e) {
    throw ParseError("'" + path + "': " + e.what());
  }
  return index;
}

void save_index(const DatasetIndex& index, const std::string& path) {
  index.validate();
  ordered_json doc;
  doc["images"] = json::array();
  for (const auto& img : index.images) {
    ordered_json rec;
    rec["id"] = img.id;
    rec["file_name"] = img.file_path;
    rec["width"] = img.width;
    rec["height"] = img.height;
    rec["condition"] = img.condition.str();
    if (img.provenance) {
      rec["tile"] = {{"parent_image_id", img.provenance->parent_image_id},
                     {"x0", img.provenance->x0},
                     {"y0", img.provenance->y0}};
    }
    doc["images"].push_back(std::move(rec));
  }
  doc["annotations"] = json::array();
  for (const auto& ann : index.annotations) {
    ordered_json rec;
    rec["id"] = ann.id;
    rec["image_id"] = ann.image_id;
    rec["category_id"] = ann.category_id;
    rec["bbox"] = bbox_to_json(ann.bbox);
    rec["area"] = ann.bbox.area();
    rec["iscrowd"] = ann.ignore ? 1 : 0;
    doc["annotations"].push_back(std::move(rec));
  }
  doc["categories"] = json::array();
  for (const auto& cat : index.categories) {
    ordered_json rec;
    rec["id"] = cat.id;
    rec["name"] = cat.name;
    doc["categories"].push_back(std::move(rec));
  }
  write_file(doc, path);
}

std::vector<DetectionResult> load_detections(const std::string& path) {
  json doc = parse_file(path);
  if (!doc.is_array()) throw ParseError("'" + path + "': top level must be an array");

  std::vector<DetectionResult> dets;
  dets.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& rec = doc[i];
    std::string where = entity("detections", i);
    DetectionResult det;
    det.image_id = require_as<std::int64_t>(rec, "image_id", where);
    det.category_id = require_as<std::int64_t>(rec, "category_id", where);
    det.bbox = parse_bbox(require(rec, "bbox", where), where);
    det.score = require_as<double>(rec, "score", where);
    if (!(det.score >= 0.0 && det.score <= 1.0))
      throw ParseError(where + ": score " + std::to_string(det.score) +
                       " outside [0, 1]");
    dets.push_back(det);
  }
  return dets;
}

void save_detections(const std::vector<DetectionResult>& dets, const std::string& path) {
  ordered_json doc = json::array();
  for (const auto& det : dets) {
    ordered_json rec;
    rec["image_id"] = det.image_id;
    rec["category_id"] = det.category_id;
    rec["bbox"] = bbox_to_json(det.bbox);
    rec["score"] = det.score;
    doc.push_back(std::move(rec));
  }
  write_file(doc, path);
}

}  // namespace rawkit
