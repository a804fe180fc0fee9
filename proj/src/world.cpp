#include "gridseek/world.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace gridseek::world {

std::string to_string(ArtState s) {
    switch (s) {
        case ArtState::kOpen: return "open";
        case ArtState::kClosed: return "closed";
        default: return "n/a";
    }
}

ArtState art_state_from_string(const std::string& s) {
    if (s == "open") return ArtState::kOpen;
    if (s == "closed") return ArtState::kClosed;
    return ArtState::kNa;
}

const ObjectSpec* WorldSpec::find_object(int id) const {
    for (const auto& o : objects)
        if (o.id == id) return &o;
    return nullptr;
}

const Door* WorldSpec::find_door(int id) const {
    for (const auto& d : doors)
        if (d.id == id) return &d;
    return nullptr;
}

int WorldSpec::gt_room_of(Cell c) const {
    for (const auto& r : gt_rooms)
        if (std::binary_search(r.cells.begin(), r.cells.end(), c)) return r.id;
    return -1;
}

bool PriorTable::is_container(const std::string& category) const {
    for (const auto& [container, containee] : inside)
        if (container == category) return true;
    return false;
}

VolumeClass PriorTable::volume_of(const std::string& category) const {
    for (const auto& [label, weights] : room_object)
        if (weights.count(category)) return VolumeClass::kLarge;
    return VolumeClass::kSmall;
}

void PriorTable::validate() const {
    for (const auto& [label, weights] : room_object)
        for (const auto& [cat, w] : weights)
            if (w < 0.0) throw std::invalid_argument("PriorTable: negative weight for " + cat);
    for (const auto& [container, containee] : inside) {
        if (volume_of(containee) == VolumeClass::kLarge && volume_of(container) == VolumeClass::kSmall)
            throw std::invalid_argument("PriorTable: inside pair violates size order: " + container +
                                        " < " + containee);
    }
}

PriorTable default_priors() {
    PriorTable p;
    p.room_object = {
        {"kitchen",
         {{"fridge", 3.0}, {"oven", 2.0}, {"cabinet", 3.0}, {"counter", 2.0}, {"table", 1.5}, {"chair", 1.0}}},
        {"living room",
         {{"sofa", 3.0}, {"tv", 2.0}, {"bookshelf", 2.0}, {"coffee table", 2.0}, {"armchair", 1.0}}},
        {"bedroom", {{"bed", 3.0}, {"wardrobe", 2.5}, {"nightstand", 2.0}, {"dresser", 1.5}}},
        {"bathroom", {{"bathtub", 2.0}, {"toilet", 3.0}, {"sink", 2.0}, {"washing machine", 1.0}}},
        {"corridor", {{"coat rack", 2.0}, {"shoe rack", 2.0}}},
    };
    p.on_top = {
        {"table", "cup"},        {"table", "book"},        {"counter", "bowl"},
        {"counter", "cup"},      {"coffee table", "book"}, {"coffee table", "remote"},
        {"nightstand", "lamp"},  {"dresser", "lamp"},      {"shoe rack", "shoes"},
        {"bookshelf", "book"},
    };
    p.inside = {
        {"fridge", "milk"},     {"fridge", "juice"},   {"cabinet", "cup"},
        {"cabinet", "plate"},   {"cabinet", "bowl"},   {"wardrobe", "jacket"},
        {"wardrobe", "shoes"},  {"dresser", "shirt"},  {"nightstand", "book"},
        {"oven", "tray"},       {"washing machine", "towel"},
    };
    return p;
}

namespace {

struct Rect {
    int x0, y0, x1, y1;  // inclusive floor area
    int w() const { return x1 - x0 + 1; }
    int h() const { return y1 - y0 + 1; }
    long area() const { return static_cast<long>(w()) * h(); }
};

struct FootprintSize {
    const char* category;
    int w, h;  // cells, long side first
};

constexpr FootprintSize kFootprints[] = {
    {"fridge", 9, 9},       {"oven", 8, 8},        {"cabinet", 13, 7},
    {"counter", 20, 8},     {"table", 15, 10},     {"chair", 6, 6},
    {"sofa", 24, 11},       {"tv", 16, 4},         {"bookshelf", 13, 5},
    {"coffee table", 13, 8},{"armchair", 10, 10},  {"bed", 25, 20},
    {"wardrobe", 16, 8},    {"nightstand", 6, 6},  {"dresser", 13, 7},
    {"bathtub", 21, 9},     {"toilet", 8, 6},      {"sink", 6, 5},
    {"washing machine", 8, 8}, {"coat rack", 5, 5},{"shoe rack", 10, 4},
};

std::pair<int, int> footprint_size(const std::string& category) {
    for (const auto& f : kFootprints)
        if (category == f.category) return {f.w, f.h};
    return {8, 8};
}

// Wall runs between two leaf rects; empty when they do not share a wall line.
std::vector<Cell> shared_wall_run(const Rect& a, const Rect& b) {
    std::vector<Cell> run;
    if (b.x0 == a.x1 + 2 || a.x0 == b.x1 + 2) {
        const int wx = (b.x0 == a.x1 + 2) ? a.x1 + 1 : b.x1 + 1;
        const int lo = std::max(a.y0, b.y0);
        const int hi = std::min(a.y1, b.y1);
        for (int y = lo; y <= hi; ++y) run.push_back({wx, y});
    } else if (b.y0 == a.y1 + 2 || a.y0 == b.y1 + 2) {
        const int wy = (b.y0 == a.y1 + 2) ? a.y1 + 1 : b.y1 + 1;
        const int lo = std::max(a.x0, b.x0);
        const int hi = std::min(a.x1, b.x1);
        for (int x = lo; x <= hi; ++x) run.push_back({x, wy});
    }
    return run;
}

struct LayoutDraft {
    WorldSpec spec;
    std::vector<Rect> rooms;
    Grid<uint8_t> blocked;  // walls + footprints (doors passable)
    int next_id = 0;
};

bool try_generate(uint64_t seed, const LayoutConfig& cfg, Rng& rng, LayoutDraft& out) {
    const int W = cfg.width, H = cfg.height;
    if (W < cfg.min_room_side + 2 || H < cfg.min_room_side + 2) return false;

    WorldSpec spec;
    spec.width = W;
    spec.height = H;
    spec.resolution = kDefaultResolution;
    for (int x = 0; x < W; ++x) {
        spec.walls.insert({x, 0});
        spec.walls.insert({x, H - 1});
    }
    for (int y = 0; y < H; ++y) {
        spec.walls.insert({0, y});
        spec.walls.insert({W - 1, y});
    }

    const int target_rooms = rng.range(cfg.min_rooms, cfg.max_rooms);
    std::vector<Rect> leaves;
    const Rect interior{1, 1, W - 2, H - 2};

    int corridor_index = -1;
    if (cfg.corridor && target_rooms >= 3) {
        // Horizontal corridor strip through the middle; rooms split off above
        // and below.
        const int cw = 7;
        const int min_band = cfg.min_room_side + 1;
        const int lo = interior.y0 + min_band;
        const int hi = interior.y1 - min_band - cw;
        if (hi < lo) return false;
        const int yc = rng.range(lo, hi);
        for (int x = interior.x0; x <= interior.x1; ++x) {
            spec.walls.insert({x, yc - 1});
            spec.walls.insert({x, yc + cw});
        }
        leaves.push_back({interior.x0, interior.y0, interior.x1, yc - 2});
        leaves.push_back({interior.x0, yc, interior.x1, yc + cw - 1});
        corridor_index = 1;
        leaves.push_back({interior.x0, yc + cw + 1, interior.x1, interior.y1});
    } else {
        leaves.push_back(interior);
    }

    // BSP-split the largest splittable leaf until the target count is reached.
    while (static_cast<int>(leaves.size()) < target_rooms) {
        int pick = -1;
        long best = -1;
        for (size_t i = 0; i < leaves.size(); ++i) {
            if (static_cast<int>(i) == corridor_index) continue;
            const Rect& r = leaves[i];
            const bool splittable =
                r.w() >= 2 * cfg.min_room_side + 1 || r.h() >= 2 * cfg.min_room_side + 1;
            if (splittable && r.area() > best) {
                best = r.area();
                pick = static_cast<int>(i);
            }
        }
        if (pick < 0) return false;
        Rect r = leaves[pick];
        const bool split_x = (r.w() >= r.h()) ? r.w() >= 2 * cfg.min_room_side + 1
                                              : !(r.h() >= 2 * cfg.min_room_side + 1);
        if (split_x) {
            const int s = rng.range(r.x0 + cfg.min_room_side, r.x1 - cfg.min_room_side);
            for (int y = r.y0; y <= r.y1; ++y) spec.walls.insert({s, y});
            leaves[pick] = {r.x0, r.y0, s - 1, r.y1};
            leaves.push_back({s + 1, r.y0, r.x1, r.y1});
        } else {
            const int s = rng.range(r.y0 + cfg.min_room_side, r.y1 - cfg.min_room_side);
            for (int x = r.x0; x <= r.x1; ++x) spec.walls.insert({x, s});
            leaves[pick] = {r.x0, r.y0, r.x1, s - 1};
            leaves.push_back({r.x0, s + 1, r.x1, r.y1});
        }
    }

    int next_id = 0;

    // One door per pair of rooms whose shared wall run fits one.
    for (size_t i = 0; i < leaves.size(); ++i) {
        for (size_t j = i + 1; j < leaves.size(); ++j) {
            auto run = shared_wall_run(leaves[i], leaves[j]);
            if (static_cast<int>(run.size()) < cfg.door_width + 2) continue;
            const int start = (static_cast<int>(run.size()) - cfg.door_width) / 2;
            Door d;
            d.id = next_id++;
            d.state = ArtState::kClosed;
            for (int k = 0; k < cfg.door_width; ++k) {
                d.blocked_cells.push_back(run[start + k]);
                spec.walls.erase(run[start + k]);
            }
            d.center = d.blocked_cells[cfg.door_width / 2];
            spec.doors.push_back(d);
        }
    }
    if (leaves.size() == 1 && !spec.doors.empty()) return false;

    // Room labels from the prior table's vocabulary; corridor strip keeps its
    // own label.
    std::vector<std::string> pool;
    for (const auto& [label, weights] : cfg.priors.room_object)
        if (label != "corridor") pool.push_back(label);
    if (pool.empty()) pool.push_back("room");
    std::vector<std::string> bag = pool;
    rng.shuffle(bag);
    size_t bag_pos = 0;

    for (size_t i = 0; i < leaves.size(); ++i) {
        GtRoom room;
        room.id = static_cast<int>(i);
        if (static_cast<int>(i) == corridor_index) {
            room.label = "corridor";
        } else {
            if (bag_pos == bag.size()) {
                bag = pool;
                rng.shuffle(bag);
                bag_pos = 0;
            }
            room.label = bag[bag_pos++];
        }
        for (int y = leaves[i].y0; y <= leaves[i].y1; ++y)
            for (int x = leaves[i].x0; x <= leaves[i].x1; ++x) room.cells.push_back({x, y});
        std::sort(room.cells.begin(), room.cells.end());
        spec.gt_rooms.push_back(std::move(room));
    }

    // Furniture placement, flush against room walls, keeping door approaches
    // clear and the room floor connected.
    Grid<uint8_t> blocked(W, H, 0);
    for (const Cell& c : spec.walls) blocked.at(c) = 1;

    Grid<uint8_t> door_zone(W, H, 0);
    for (const auto& d : spec.doors) {
        for (const Cell& c : d.blocked_cells) {
            for (int dy = -8; dy <= 8; ++dy)
                for (int dx = -8; dx <= 8; ++dx) {
                    Cell z{c.x + dx, c.y + dy};
                    if (door_zone.in_bounds(z)) door_zone.at(z) = 1;
                }
        }
    }

    auto room_connected_with = [&](size_t room_idx, const Grid<uint8_t>& blk) {
        const Rect& r = leaves[room_idx];
        Cell seed_cell{-1, -1};
        int free_count = 0;
        for (int y = r.y0; y <= r.y1; ++y)
            for (int x = r.x0; x <= r.x1; ++x)
                if (!blk.at(x, y)) {
                    if (seed_cell.x < 0) seed_cell = {x, y};
                    ++free_count;
                }
        if (free_count == 0) return false;
        Grid<uint8_t> seen(W, H, 0);
        std::deque<Cell> q{seed_cell};
        seen.at(seed_cell) = 1;
        int reached = 1;
        while (!q.empty()) {
            Cell c = q.front();
            q.pop_front();
            for (int k = 0; k < 4; ++k) {
                Cell n{c.x + kDir4X[k], c.y + kDir4Y[k]};
                if (n.x < r.x0 || n.x > r.x1 || n.y < r.y0 || n.y > r.y1) continue;
                if (seen.at(n) || blk.at(n)) continue;
                seen.at(n) = 1;
                ++reached;
                q.push_back(n);
            }
        }
        if (reached != free_count) return false;
        // Every door aperture into this room must keep its room-side cells free.
        for (const auto& d : spec.doors)
            for (const Cell& c : d.blocked_cells)
                for (int k = 0; k < 4; ++k) {
                    Cell n{c.x + kDir4X[k], c.y + kDir4Y[k]};
                    if (n.x < r.x0 || n.x > r.x1 || n.y < r.y0 || n.y > r.y1) continue;
                    if (blk.at(n) || !seen.at(n)) return false;
                }
        return true;
    };

    for (size_t i = 0; i < leaves.size(); ++i) {
        const Rect& r = leaves[i];
        const std::string& label = spec.gt_rooms[i].label;
        auto it = cfg.priors.room_object.find(label);
        if (it == cfg.priors.room_object.end() || it->second.empty()) continue;

        std::vector<std::string> cats;
        std::vector<double> weights;
        for (const auto& [cat, w] : it->second) {
            cats.push_back(cat);
            weights.push_back(w);
        }
        int want = rng.range(std::max(1, cfg.min_furniture_per_room), cfg.max_furniture_per_room);
        if (static_cast<int>(i) == corridor_index) want = 1;

        int placed = 0;
        std::vector<double> w = weights;
        while (placed < want) {
            const int ci = rng.weighted(w);
            if (ci < 0) break;
            w[ci] = 0.0;  // without replacement
            auto [fw, fh] = footprint_size(cats[ci]);
            bool ok = false;
            for (int attempt = 0; attempt < 40 && !ok; ++attempt) {
                const int side = rng.range(0, 3);  // 0=N,1=S,2=W,3=E wall
                int bw = fw, bh = fh;
                if (side >= 2) std::swap(bw, bh);  // long side along the wall
                if (bw > r.w() - 2 || bh > r.h() - 2) continue;
                int x0, y0;
                if (side == 0) {
                    x0 = rng.range(r.x0, r.x1 - bw + 1);
                    y0 = r.y0;
                } else if (side == 1) {
                    x0 = rng.range(r.x0, r.x1 - bw + 1);
                    y0 = r.y1 - bh + 1;
                } else if (side == 2) {
                    x0 = r.x0;
                    y0 = rng.range(r.y0, r.y1 - bh + 1);
                } else {
                    x0 = r.x1 - bw + 1;
                    y0 = rng.range(r.y0, r.y1 - bh + 1);
                }
                bool clear = true;
                for (int y = y0 - 1; y <= y0 + bh && clear; ++y)
                    for (int x = x0 - 1; x <= x0 + bw && clear; ++x) {
                        if (!blocked.in_bounds(x, y)) continue;
                        const bool inside_fp = x >= x0 && y >= y0 && x < x0 + bw && y < y0 + bh;
                        if (inside_fp && (blocked.at(x, y) || door_zone.at(x, y))) clear = false;
                        if (!inside_fp && blocked.at(x, y) && !spec.walls.count({x, y})) clear = false;
                    }
                if (!clear) continue;

                ObjectSpec obj;
                obj.id = next_id;
                obj.category = cats[ci];
                for (int y = y0; y < y0 + bh; ++y)
                    for (int x = x0; x < x0 + bw; ++x) obj.footprint.push_back({x, y});
                std::sort(obj.footprint.begin(), obj.footprint.end());
                obj.position = {x0 + bw / 2, y0 + bh / 2};
                obj.openable = cfg.priors.is_container(obj.category);
                obj.state = obj.openable ? ArtState::kClosed : ArtState::kNa;
                obj.volume = VolumeClass::kLarge;

                Grid<uint8_t> trial = blocked;
                for (const Cell& c : obj.footprint) trial.at(c) = 1;
                if (!room_connected_with(i, trial)) continue;

                blocked = std::move(trial);
                spec.objects.push_back(std::move(obj));
                ++next_id;
                ok = true;
            }
            if (ok) ++placed;
        }
        if (placed == 0) return false;
    }

    // Start pose on free space with the 8-neighborhood free as well.
    std::vector<Cell> start_candidates;
    for (int y = 1; y < H - 1; ++y)
        for (int x = 1; x < W - 1; ++x) {
            bool ok = true;
            for (int dy = -1; dy <= 1 && ok; ++dy)
                for (int dx = -1; dx <= 1 && ok; ++dx)
                    if (blocked.at(x + dx, y + dy)) ok = false;
            for (const auto& d : spec.doors)
                for (const Cell& c : d.blocked_cells)
                    if (std::abs(c.x - x) <= 1 && std::abs(c.y - y) <= 1) ok = false;
            if (ok) start_candidates.push_back({x, y});
        }
    if (start_candidates.empty()) return false;
    spec.agent_start.cell = start_candidates[rng.below(start_candidates.size())];
    spec.agent_start.heading = rng.range(0, 7) * M_PI / 4.0;

    // All free space must be mutually reachable with doors treated as open.
    {
        Grid<uint8_t> mask = reachable_mask(spec, spec.agent_start.cell);
        for (int y = 1; y < H - 1; ++y)
            for (int x = 1; x < W - 1; ++x)
                if (!blocked.at(x, y) && !mask.at(x, y)) return false;
    }

    out.spec = std::move(spec);
    out.rooms = std::move(leaves);
    out.blocked = std::move(blocked);
    out.next_id = next_id;
    (void)seed;
    return true;
}

}  // namespace

WorldSpec generate_layout(uint64_t seed, const LayoutConfig& config) {
    config.priors.validate();
    for (int attempt = 0; attempt < config.max_attempts; ++attempt) {
        Rng rng(Rng::mix(seed, static_cast<uint64_t>(attempt)));
        LayoutDraft draft;
        if (try_generate(seed, config, rng, draft)) return std::move(draft.spec);
    }
    throw std::runtime_error("generate_layout: no valid layout for seed " + std::to_string(seed));
}

Grid<uint8_t> reachable_mask(const WorldSpec& spec, Cell start) {
    Grid<uint8_t> blocked(spec.width, spec.height, 0);
    for (const Cell& c : spec.walls) blocked.at(c) = 1;
    for (const auto& o : spec.objects)
        for (const Cell& c : o.footprint) blocked.at(c) = 1;
    Grid<uint8_t> mask(spec.width, spec.height, 0);
    if (!mask.in_bounds(start) || blocked.at(start)) return mask;
    std::deque<Cell> q{start};
    mask.at(start) = 1;
    while (!q.empty()) {
        Cell c = q.front();
        q.pop_front();
        for (int k = 0; k < 4; ++k) {
            Cell n{c.x + kDir4X[k], c.y + kDir4Y[k]};
            if (!mask.in_bounds(n) || mask.at(n) || blocked.at(n)) continue;
            mask.at(n) = 1;
            q.push_back(n);
        }
    }
    return mask;
}

namespace {

bool target_reachable(const WorldSpec& spec, Cell start, const std::string& category) {
    Grid<uint8_t> mask = reachable_mask(spec, start);
    const double radius_cells = 1.5 / spec.resolution;
    for (const auto& o : spec.objects) {
        if (o.category != category) continue;
        const int r = static_cast<int>(radius_cells) + 1;
        for (int dy = -r; dy <= r; ++dy)
            for (int dx = -r; dx <= r; ++dx) {
                Cell c{o.position.x + dx, o.position.y + dy};
                if (!mask.in_bounds(c) || !mask.at(c)) continue;
                if (cell_dist(c, o.position) <= radius_cells) return true;
            }
    }
    return false;
}

}  // namespace

Episode enrich_episode(WorldSpec layout, const PriorTable& priors, uint64_t seed,
                       const EnrichConfig& config) {
    priors.validate();
    Rng rng(Rng::mix(seed, 0xe717));

    int next_id = 0;
    for (const auto& d : layout.doors) next_id = std::max(next_id, d.id + 1);
    for (const auto& o : layout.objects) next_id = std::max(next_id, o.id + 1);

    const size_t furniture_count = layout.objects.size();
    for (size_t fi = 0; fi < furniture_count; ++fi) {
        // Admissible relations for this piece of furniture.
        std::vector<std::pair<Relation, std::string>> admissible;
        const std::string category = layout.objects[fi].category;
        for (const auto& [sup, item] : priors.on_top)
            if (sup == category) admissible.emplace_back(Relation::kOnTop, item);
        if (layout.objects[fi].openable)
            for (const auto& [container, item] : priors.inside)
                if (container == category) admissible.emplace_back(Relation::kInside, item);
        if (admissible.empty()) continue;

        int want = 0;
        for (int k = 0; k < config.max_items_per_furniture; ++k)
            if (rng.chance(config.item_probability)) ++want;

        std::vector<size_t> order(admissible.size());
        for (size_t k = 0; k < order.size(); ++k) order[k] = k;
        rng.shuffle(order);

        int placed = 0;
        std::set<Cell> used_top_cells;
        for (size_t oi = 0; oi < order.size() && placed < want; ++oi) {
            const auto& [rel, item_cat] = admissible[order[oi]];
            ObjectSpec& parent = layout.objects[fi];
            ObjectSpec item;
            item.id = next_id;
            item.category = item_cat;
            item.openable = false;
            item.state = ArtState::kNa;
            item.volume = priors.volume_of(item_cat);
            item.parent_id = parent.id;
            item.parent_relation = rel;
            if (rel == Relation::kOnTop) {
                std::vector<Cell> free_cells;
                for (const Cell& c : parent.footprint)
                    if (!used_top_cells.count(c)) free_cells.push_back(c);
                if (free_cells.empty()) continue;  // placement failed, keep drawing
                item.position = free_cells[rng.below(free_cells.size())];
                used_top_cells.insert(item.position);
            } else {
                if (static_cast<int>(parent.contains.size()) >= config.max_items_per_furniture)
                    continue;
                item.position = parent.position;
            }
            item.footprint = {item.position};
            parent.contains.push_back(item.id);
            layout.objects.push_back(std::move(item));
            ++next_id;
            ++placed;
        }
    }

    // Target and start: reachable, and not visible from the start pose.
    std::vector<std::string> categories;
    for (const auto& o : layout.objects) categories.push_back(o.category);
    std::sort(categories.begin(), categories.end());
    categories.erase(std::unique(categories.begin(), categories.end()), categories.end());
    if (categories.empty()) throw std::runtime_error("enrich_episode: world has no objects");

    Grid<uint8_t> blocked(layout.width, layout.height, 0);
    for (const Cell& c : layout.walls) blocked.at(c) = 1;
    for (const auto& o : layout.objects)
        for (const Cell& c : o.footprint) blocked.at(c) = 1;
    std::vector<Cell> start_candidates;
    for (int y = 1; y < layout.height - 1; ++y)
        for (int x = 1; x < layout.width - 1; ++x) {
            bool ok = true;
            for (int dy = -1; dy <= 1 && ok; ++dy)
                for (int dx = -1; dx <= 1 && dx <= 1 && ok; ++dx)
                    if (blocked.at(x + dx, y + dy)) ok = false;
            for (const auto& d : layout.doors)
                for (const Cell& c : d.blocked_cells)
                    if (std::abs(c.x - x) <= 1 && std::abs(c.y - y) <= 1) ok = false;
            if (ok) start_candidates.push_back({x, y});
        }
    if (start_candidates.empty()) throw std::runtime_error("enrich_episode: no start candidates");

    SenseConfig visibility;
    visibility.fov_rad = 2.0 * M_PI + 1.0;  // full panoramic check

    for (int attempt = 0; attempt < config.max_placement_attempts; ++attempt) {
        Episode ep;
        ep.world = layout;
        ep.seed = seed;
        ep.target_category = categories[rng.below(categories.size())];
        ep.world.agent_start.cell = start_candidates[rng.below(start_candidates.size())];
        ep.world.agent_start.heading = rng.range(0, 7) * M_PI / 4.0;

        if (!target_reachable(ep.world, ep.world.agent_start.cell, ep.target_category)) continue;

        WorldState probe(ep);
        Observation obs = probe.sense_from(ep.world.agent_start, visibility);
        bool visible = false;
        for (const auto& inst : obs.instances)
            if (inst.category == ep.target_category) visible = true;
        if (visible) continue;
        return ep;
    }
    throw std::runtime_error("enrich_episode: no feasible (target, start) pair for seed " +
                             std::to_string(seed));
}

WorldState::WorldState(Episode episode)
    : episode_(std::move(episode)),
      pose_(episode_.world.agent_start),
      static_instance_(episode_.world.width, episode_.world.height, -1),
      static_occupied_(episode_.world.width, episode_.world.height, 0) {
    for (const Cell& c : episode_.world.walls) static_occupied_.at(c) = 1;
    for (const auto& o : episode_.world.objects) {
        if (o.parent_relation != Relation::kNone) continue;  // items live on/in furniture
        for (const Cell& c : o.footprint) {
            static_occupied_.at(c) = 1;
            static_instance_.at(c) = o.id;
        }
        if (o.openable) states_[o.id] = o.state;
    }
    for (const auto& d : episode_.world.doors) {
        for (const Cell& c : d.blocked_cells) static_instance_.at(c) = d.id;
        states_[d.id] = d.state;
    }
}

ArtState WorldState::object_state(int id) const {
    auto it = states_.find(id);
    if (it != states_.end()) return it->second;
    return ArtState::kNa;
}

bool WorldState::door_cell_closed(Cell c) const {
    const int id = static_instance_.at(c);
    if (id < 0) return false;
    if (episode_.world.find_door(id) == nullptr) return false;
    return object_state(id) == ArtState::kClosed;
}

bool WorldState::occupied(Cell c) const {
    if (!static_occupied_.in_bounds(c)) return true;
    if (static_occupied_.at(c)) return true;
    return door_cell_closed(c);
}

StepResult WorldState::step(const LowLevelAction& action, double interaction_radius_m) {
    StepResult res;
    if (done_) {
        res.action_ok = false;
        return res;
    }
    switch (action.type) {
        case ActionType::kForward: {
            res.cost = 1;
            const int dx = static_cast<int>(std::lround(std::cos(pose_.heading)));
            const int dy = static_cast<int>(std::lround(std::sin(pose_.heading)));
            Cell next{pose_.cell.x + dx, pose_.cell.y + dy};
            if (!occupied(next)) {
                pose_.cell = next;
                res.moved = true;
            } else {
                res.action_ok = false;
            }
            break;
        }
        case ActionType::kTurnLeft:
            res.cost = 1;
            pose_.heading = normalize_angle(pose_.heading + action.angle);
            break;
        case ActionType::kTurnRight:
            res.cost = 1;
            pose_.heading = normalize_angle(pose_.heading - action.angle);
            break;
        case ActionType::kOpen:
        case ActionType::kClose: {
            const bool opening = action.type == ActionType::kOpen;
            auto it = states_.find(action.target_id);
            if (it == states_.end()) {  // unknown or non-openable id
                res.action_ok = false;
                break;
            }
            std::vector<Cell> cells;
            if (const Door* d = episode_.world.find_door(action.target_id)) {
                cells = d->blocked_cells;
            } else if (const ObjectSpec* o = episode_.world.find_object(action.target_id)) {
                cells = o->footprint;
            }
            double best = 1e18;
            for (const Cell& c : cells)
                best = std::min(best, cell_dist(pose_.cell, c) * episode_.world.resolution);
            if (best > interaction_radius_m) {
                res.action_ok = false;  // out of range
                break;
            }
            const ArtState need = opening ? ArtState::kClosed : ArtState::kOpen;
            if (it->second != need) {
                res.action_ok = false;  // includes open-on-open idempotence
                break;
            }
            it->second = opening ? ArtState::kOpen : ArtState::kClosed;
            res.cost = 30;
            break;
        }
        case ActionType::kDone:
            done_ = true;
            break;
    }
    return res;
}

Observation WorldState::sense(const SenseConfig& config) const {
    return sense_from(pose_, config);
}

namespace {

// Recursive shadowcasting over one octant (transform given by xx..yy).
struct ShadowCaster {
    const WorldState& state;
    Cell origin;
    double radius2;
    Grid<uint8_t>& visible;

    void cast(int row, double start_slope, double end_slope, int xx, int xy, int yx, int yy) {
        if (start_slope < end_slope) return;
        const int radius = static_cast<int>(std::ceil(std::sqrt(radius2)));
        double next_start = start_slope;
        for (int i = row; i <= radius; ++i) {
            bool blocked = false;
            const int dy = -i;
            for (int dx = -i; dx <= 0; ++dx) {
                const double l_slope = (dx - 0.5) / (dy + 0.5);
                const double r_slope = (dx + 0.5) / (dy - 0.5);
                if (start_slope < r_slope) continue;
                if (end_slope > l_slope) break;
                const Cell c{origin.x + dx * xx + dy * xy, origin.y + dx * yx + dy * yy};
                const bool in = visible.in_bounds(c);
                if (in && static_cast<double>(dx) * dx + static_cast<double>(dy) * dy <= radius2)
                    visible.at(c) = 1;
                const bool opaque = !in || state.occupied(c);
                if (blocked) {
                    if (opaque) {
                        next_start = r_slope;
                    } else {
                        blocked = false;
                        start_slope = next_start;
                    }
                } else if (opaque && i < radius) {
                    blocked = true;
                    cast(i + 1, start_slope, l_slope, xx, xy, yx, yy);
                    next_start = r_slope;
                }
            }
            if (blocked) break;
        }
    }
};

constexpr int kOctants[8][4] = {
    {1, 0, 0, 1},  {0, 1, 1, 0},  {0, -1, 1, 0},  {-1, 0, 0, 1},
    {-1, 0, 0, -1}, {0, -1, -1, 0}, {0, 1, -1, 0}, {1, 0, 0, -1},
};

}  // namespace

Observation WorldState::sense_from(const Pose& pose, const SenseConfig& config) const {
    const WorldSpec& spec = episode_.world;
    const double radius_cells = config.max_range_m / spec.resolution;
    Grid<uint8_t> visible(spec.width, spec.height, 0);
    visible.at(pose.cell) = 1;
    ShadowCaster caster{*this, pose.cell, radius_cells * radius_cells, visible};
    for (const auto& o : kOctants) caster.cast(1, 1.0, 0.0, o[0], o[1], o[2], o[3]);

    // Angular field of view filter.
    const double half_fov = config.fov_rad / 2.0;
    if (half_fov < M_PI) {
        for (int y = 0; y < spec.height; ++y)
            for (int x = 0; x < spec.width; ++x) {
                if (!visible.at(x, y)) continue;
                if (x == pose.cell.x && y == pose.cell.y) continue;
                const double ang = std::atan2(y - pose.cell.y, x - pose.cell.x);
                if (std::abs(normalize_angle(ang - pose.heading)) > half_fov + 1e-9)
                    visible.at(x, y) = 0;
            }
    }

    Observation obs;
    obs.pose = pose;
    std::map<int, int> visible_count;
    for (int y = 0; y < spec.height; ++y)
        for (int x = 0; x < spec.width; ++x) {
            if (!visible.at(x, y)) continue;
            CellObs co;
            co.cell = {x, y};
            co.occupied = occupied(co.cell);
            co.instance = static_instance_.at(x, y);
            if (co.instance >= 0) ++visible_count[co.instance];
            obs.cells.push_back(co);
        }

    // Instance detections: furniture and doors need enough visible footprint
    // cells; items on top need their own cell; contained items are detected
    // through an open, detected parent.
    std::map<int, bool> detected;
    auto threshold = [&](VolumeClass v) {
        return v == VolumeClass::kSmall ? config.min_cells_small : config.min_cells_large;
    };
    for (const auto& d : spec.doors)
        detected[d.id] = visible_count[d.id] >= config.min_cells_large;
    for (const auto& o : spec.objects) {
        if (o.parent_relation == Relation::kNone) {
            detected[o.id] = visible_count[o.id] >= threshold(o.volume);
        } else if (o.parent_relation == Relation::kOnTop) {
            detected[o.id] = visible.at(o.position) != 0;
        }
    }
    for (const auto& o : spec.objects)
        if (o.parent_relation == Relation::kInside)
            detected[o.id] = detected[o.parent_id] && object_state(o.parent_id) == ArtState::kOpen;

    for (const auto& d : spec.doors) {
        if (!detected[d.id]) continue;
        obs.instances.push_back({d.id, "door", object_state(d.id), d.center,
                                 visible_count[d.id]});
    }
    for (const auto& o : spec.objects) {
        if (!detected[o.id]) continue;
        obs.instances.push_back({o.id, o.category, object_state(o.id), o.position,
                                 std::max(visible_count[o.id], 1)});
    }
    std::sort(obs.instances.begin(), obs.instances.end(),
              [](const InstanceObs& a, const InstanceObs& b) { return a.id < b.id; });
    return obs;
}

}  // namespace gridseek::world
