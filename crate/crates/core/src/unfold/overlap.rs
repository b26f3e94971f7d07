use std::collections::{BTreeSet, HashMap};

use nalgebra::Point2;
use robust::{orient2d, Coord};

use super::{Layout2D, Tri, UnfoldTree};
use crate::mesh::FaceId;

/// Unordered face pairs whose triangles overlap, stored with the smaller id first.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OverlapSet {
    pairs: BTreeSet<(FaceId, FaceId)>,
}

impl OverlapSet {
    pub fn insert(&mut self, a: FaceId, b: FaceId) {
        self.pairs.insert((a.min(b), a.max(b)));
    }

    pub fn contains(&self, a: FaceId, b: FaceId) -> bool {
        self.pairs.contains(&(a.min(b), a.max(b)))
    }

    pub fn count(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (FaceId, FaceId)> + '_ {
        self.pairs.iter().copied()
    }

    /// Faces taking part in at least one pair.
    pub fn faces(&self) -> BTreeSet<FaceId> {
        self.pairs.iter().flat_map(|&(a, b)| [a, b]).collect()
    }

    /// Pairs with at least one face in `faces`.
    pub fn restricted_to(&self, faces: &BTreeSet<FaceId>) -> OverlapSet {
        OverlapSet {
            pairs: self
                .pairs
                .iter()
                .filter(|(a, b)| faces.contains(a) || faces.contains(b))
                .copied()
                .collect(),
        }
    }
}

impl FromIterator<(FaceId, FaceId)> for OverlapSet {
    fn from_iter<I: IntoIterator<Item = (FaceId, FaceId)>>(iter: I) -> Self {
        let mut s = OverlapSet::default();
        for (a, b) in iter {
            s.insert(a, b);
        }
        s
    }
}

fn coord(p: Point2<f64>) -> Coord<f64> {
    Coord { x: p.x, y: p.y }
}

fn orientation(t: &Tri) -> f64 {
    orient2d(coord(t[0]), coord(t[1]), coord(t[2]))
}

/// Whether some edge line of `t` (oriented by `sign`) has all of `other` on
/// its closed outer side.
fn has_separating_edge(t: &Tri, sign: f64, other: &Tri) -> bool {
    (0..3).any(|i| {
        let (a, b) = (coord(t[i]), coord(t[(i + 1) % 3]));
        other.iter().all(|&p| sign * orient2d(a, b, coord(p)) <= 0.0)
    })
}

/// Exact test for interiors that intersect in a region of positive area.
/// Contact along an edge or at a point does not count, and degenerate
/// triangles never overlap.
pub fn triangles_overlap(a: &Tri, b: &Tri) -> bool {
    let (sa, sb) = (orientation(a), orientation(b));
    if sa == 0.0 || sb == 0.0 {
        return false;
    }
    !has_separating_edge(a, sa.signum(), b) && !has_separating_edge(b, sb.signum(), a)
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct BBox {
    lo: Point2<f64>,
    hi: Point2<f64>,
}

impl BBox {
    fn of(t: &Tri) -> Self {
        let mut lo = t[0];
        let mut hi = t[0];
        for p in &t[1..] {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        BBox { lo, hi }
    }

    fn touches(&self, o: &BBox) -> bool {
        self.lo.x <= o.hi.x && o.lo.x <= self.hi.x && self.lo.y <= o.hi.y && o.lo.y <= self.hi.y
    }
}

/// Uniform hash grid over bounding boxes.
#[derive(Clone, Debug)]
struct Grid {
    cell: f64,
    cells: HashMap<(i64, i64), Vec<u32>>,
}

impl Grid {
    fn new(cell: f64) -> Self {
        Self {
            cell,
            cells: HashMap::new(),
        }
    }

    /// Cell size from the mean bounding-box extent of `tris`.
    fn cell_size<'a>(tris: impl Iterator<Item = &'a Tri>) -> f64 {
        let (mut sum, mut n) = (0.0, 0usize);
        for t in tris {
            let b = BBox::of(t);
            sum += (b.hi.x - b.lo.x).max(b.hi.y - b.lo.y);
            n += 1;
        }
        let c = if n == 0 { 1.0 } else { sum / n as f64 };
        if c.is_finite() && c > 0.0 {
            c
        } else {
            1.0
        }
    }

    fn key(&self, p: Point2<f64>) -> (i64, i64) {
        ((p.x / self.cell).floor() as i64, (p.y / self.cell).floor() as i64)
    }

    fn range(&self, b: &BBox) -> ((i64, i64), (i64, i64)) {
        (self.key(b.lo), self.key(b.hi))
    }

    fn insert(&mut self, id: u32, b: &BBox) {
        let ((x0, y0), (x1, y1)) = self.range(b);
        for x in x0..=x1 {
            for y in y0..=y1 {
                self.cells.entry((x, y)).or_default().push(id);
            }
        }
    }

    fn remove(&mut self, id: u32, b: &BBox) {
        let ((x0, y0), (x1, y1)) = self.range(b);
        for x in x0..=x1 {
            for y in y0..=y1 {
                if let Some(v) = self.cells.get_mut(&(x, y)) {
                    if let Some(pos) = v.iter().position(|&i| i == id) {
                        v.swap_remove(pos);
                    }
                }
            }
        }
    }

    /// Calls `f` once for every stored id whose box touches `b`. A pair is
    /// reported only from the cell holding the low corner of the two boxes'
    /// intersection, which de-duplicates without a set.
    fn for_each_candidate(&self, b: &BBox, boxes: impl Fn(u32) -> BBox, mut f: impl FnMut(u32)) {
        let ((x0, y0), (x1, y1)) = self.range(b);
        for x in x0..=x1 {
            for y in y0..=y1 {
                let Some(ids) = self.cells.get(&(x, y)) else { continue };
                for &id in ids {
                    let o = boxes(id);
                    if !b.touches(&o) {
                        continue;
                    }
                    let corner = Point2::new(b.lo.x.max(o.lo.x), b.lo.y.max(o.lo.y));
                    if self.key(corner) == (x, y) {
                        f(id);
                    }
                }
            }
        }
    }
}

/// All overlapping pairs among `items`, grid accelerated.
pub fn overlaps_among(items: &[(FaceId, Tri)]) -> Vec<(FaceId, FaceId)> {
    let cell = Grid::cell_size(items.iter().map(|(_, t)| t));
    let mut grid = Grid::new(cell);
    let boxes: Vec<BBox> = items.iter().map(|(_, t)| BBox::of(t)).collect();
    let mut out = Vec::new();
    for (i, (f, t)) in items.iter().enumerate() {
        grid.for_each_candidate(&boxes[i], |j| boxes[j as usize], |j| {
            let (g, u) = &items[j as usize];
            if triangles_overlap(t, u) {
                out.push((*f.min(g), *f.max(g)));
            }
        });
        grid.insert(i as u32, &boxes[i]);
    }
    out
}

/// Every overlapping pair of the layout.
pub fn count_overlaps(layout: &Layout2D) -> OverlapSet {
    let items: Vec<(FaceId, Tri)> = layout.iter().map(|(f, t)| (f, *t)).collect();
    overlaps_among(&items).into_iter().collect()
}

/// Quadratic reference implementation of [`count_overlaps`].
pub fn count_overlaps_brute_force(layout: &Layout2D) -> OverlapSet {
    let items: Vec<(FaceId, &Tri)> = layout.iter().collect();
    let mut out = OverlapSet::default();
    for (i, (f, a)) in items.iter().enumerate() {
        for (g, b) in &items[i + 1..] {
            if triangles_overlap(a, b) {
                out.insert(*f, *g);
            }
        }
    }
    out
}

/// Overlaps involving at least one face in the subtrees rooted at `touched`.
pub fn subtree_overlap_check(tree: &UnfoldTree, layout: &Layout2D, touched: &[FaceId]) -> OverlapSet {
    let mut inside = vec![false; layout_slots(layout).max(tree.face_slots())];
    for &f in touched {
        if inside[f.index()] {
            continue;
        }
        for g in tree.subtree(f) {
            inside[g.index()] = true;
        }
    }
    if !inside.iter().any(|&b| b) {
        return OverlapSet::default();
    }
    let index = OverlapIndex::from_layout(layout, false);
    let mut out = OverlapSet::default();
    for (f, t) in layout.iter().filter(|(f, _)| inside[f.index()]) {
        index.query(t, |g| {
            if g != f && layout.get(g).is_some_and(|u| triangles_overlap(t, u)) {
                out.insert(f, g);
            }
        });
    }
    out
}

fn layout_slots(layout: &Layout2D) -> usize {
    layout.iter().last().map_or(0, |(f, _)| f.index() + 1)
}

/// Incrementally maintained overlap state of a layout.
#[derive(Clone, Debug)]
pub struct OverlapIndex {
    grid: Grid,
    boxes: Vec<Option<BBox>>,
    pairs: OverlapSet,
    partners: Vec<Vec<FaceId>>,
    overlapping: BTreeSet<FaceId>,
}

impl OverlapIndex {
    /// Indexes `layout`; with `with_pairs` the current overlaps are computed too.
    pub fn from_layout(layout: &Layout2D, with_pairs: bool) -> Self {
        let slots = layout_slots(layout);
        let mut index = Self {
            grid: Grid::new(Grid::cell_size(layout.iter().map(|(_, t)| t))),
            boxes: vec![None; slots],
            pairs: OverlapSet::default(),
            partners: vec![Vec::new(); slots],
            overlapping: BTreeSet::new(),
        };
        for (f, t) in layout.iter() {
            let b = BBox::of(t);
            index.grid.insert(f.0, &b);
            index.boxes[f.index()] = Some(b);
        }
        if with_pairs {
            for (f, t) in layout.iter() {
                let mut found = Vec::new();
                index.query(t, |g| {
                    if g < f && triangles_overlap(t, layout.get(g).unwrap()) {
                        found.push(g);
                    }
                });
                for g in found {
                    index.add_pair(f, g);
                }
            }
        }
        index
    }

    fn ensure(&mut self, f: FaceId) {
        if self.boxes.len() <= f.index() {
            self.boxes.resize(f.index() + 1, None);
            self.partners.resize(f.index() + 1, Vec::new());
        }
    }

    fn add_pair(&mut self, a: FaceId, b: FaceId) {
        self.pairs.insert(a, b);
        self.partners[a.index()].push(b);
        self.partners[b.index()].push(a);
        self.overlapping.insert(a);
        self.overlapping.insert(b);
    }

    /// Calls `f` once per indexed face whose box touches `t`'s box.
    fn query(&self, t: &Tri, mut f: impl FnMut(FaceId)) {
        let b = BBox::of(t);
        let ((x0, y0), (x1, y1)) = self.grid.range(&b);
        for x in x0..=x1 {
            for y in y0..=y1 {
                let Some(ids) = self.grid.cells.get(&(x, y)) else { continue };
                for &id in ids {
                    let o = self.boxes[id as usize].unwrap();
                    if !b.touches(&o) {
                        continue;
                    }
                    let corner = Point2::new(b.lo.x.max(o.lo.x), b.lo.y.max(o.lo.y));
                    if self.grid.key(corner) == (x, y) {
                        f(FaceId(id));
                    }
                }
            }
        }
    }

    pub fn count(&self) -> usize {
        self.pairs.count()
    }

    pub fn pairs(&self) -> &OverlapSet {
        &self.pairs
    }

    /// Faces in at least one overlapping pair, sorted by id.
    pub fn overlapping_faces(&self) -> &BTreeSet<FaceId> {
        &self.overlapping
    }

    /// Number of pairs with at least one member flagged in `inside`.
    pub fn pairs_touching(&self, faces: &[FaceId], inside: &[bool]) -> usize {
        let mut n = 0;
        for &f in faces {
            for &g in &self.partners[f.index()] {
                // count pairs inside the set once
                if !inside[g.index()] || g > f {
                    n += 1;
                }
            }
        }
        n
    }

    /// Number of pairs with exactly one member flagged in `inside`, where
    /// `faces` are the flagged faces.
    pub fn cross_pairs(&self, faces: &[FaceId], inside: &[bool]) -> usize {
        faces
            .iter()
            .map(|f| self.partners[f.index()].iter().filter(|g| !inside[g.index()]).count())
            .sum()
    }

    /// Number of indexed faces accepted by `keep` whose current triangle
    /// overlaps `t`.
    pub fn count_hits(&self, layout: &Layout2D, t: &Tri, keep: impl Fn(FaceId) -> bool) -> usize {
        let mut n = 0;
        self.query(t, |g| {
            if keep(g) && triangles_overlap(t, layout.get(g).unwrap()) {
                n += 1;
            }
        });
        n
    }

    /// Pairs with at least one member among `moved` if those faces were at
    /// the given placements and everything else stayed put.
    pub fn pairs_after(
        &self,
        layout: &Layout2D,
        moved: &[(FaceId, Tri)],
        inside: &[bool],
        mut sink: impl FnMut(FaceId, FaceId),
    ) {
        for (f, t) in moved {
            self.query(t, |g| {
                if !inside[g.index()] && triangles_overlap(t, layout.get(g).unwrap()) {
                    sink(*f, g);
                }
            });
        }
        for (a, b) in overlaps_among(moved) {
            sink(a, b);
        }
    }

    /// Count of [`Self::pairs_after`].
    pub fn count_after(&self, layout: &Layout2D, moved: &[(FaceId, Tri)], inside: &[bool]) -> usize {
        let mut n = 0;
        self.pairs_after(layout, moved, inside, |_, _| n += 1);
        n
    }

    /// Re-indexes `faces`, whose placements in `layout` have changed (or
    /// are new), and refreshes the pairs involving them.
    pub fn update(&mut self, layout: &Layout2D, faces: &[FaceId]) {
        let mut inside = vec![false; self.boxes.len().max(layout_slots(layout))];
        for &f in faces {
            inside[f.index()] = true;
        }
        for &f in faces {
            self.ensure(f);
            for g in std::mem::take(&mut self.partners[f.index()]) {
                self.pairs.pairs.remove(&(f.min(g), f.max(g)));
                self.partners[g.index()].retain(|&x| x != f);
                if self.partners[g.index()].is_empty() {
                    self.overlapping.remove(&g);
                }
            }
            self.overlapping.remove(&f);
            if let Some(b) = self.boxes[f.index()].take() {
                self.grid.remove(f.0, &b);
            }
        }
        let moved: Vec<(FaceId, Tri)> = faces
            .iter()
            .filter_map(|&f| layout.get(f).map(|t| (f, *t)))
            .collect();
        let mut found = Vec::new();
        self.pairs_after(layout, &moved, &inside, |a, b| found.push((a, b)));
        for (f, t) in &moved {
            let b = BBox::of(t);
            self.grid.insert(f.0, &b);
            self.boxes[f.index()] = Some(b);
        }
        for (a, b) in found {
            self.add_pair(a, b);
        }
    }
}
