//! Pictures, tiling systems, and the passage from pictures to graphs.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::LabeledGraph;
use crate::logic::ast::*;
use crate::structure::{Element, Structure};

/// H×W matrix of k-bit strings.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Picture {
    bits: usize,
    cells: Vec<Vec<String>>,
}

impl Picture {
    pub fn new(bits: usize, cells: Vec<Vec<String>>) -> Result<Self> {
        let width = cells.first().map_or(0, Vec::len);
        if cells.is_empty() || width == 0 {
            return Err(Error::InvalidPicture("pictures need at least one row and one column".into()));
        }
        for (i, row) in cells.iter().enumerate() {
            if row.len() != width {
                return Err(Error::InvalidPicture(format!("row {} has {} cells, expected {width}", i + 1, row.len())));
            }
            if let Some(c) = row.iter().find(|c| c.len() != bits || !c.bytes().all(|b| b == b'0' || b == b'1')) {
                return Err(Error::InvalidPicture(format!("cell {c:?} is not a {bits}-bit string")));
            }
        }
        Ok(Picture { bits, cells })
    }

    /// 0-bit picture of the given size.
    pub fn blank(height: usize, width: usize) -> Self {
        Picture::new(0, vec![vec![String::new(); width]; height]).expect("positive size")
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn height(&self) -> usize {
        self.cells.len()
    }

    pub fn width(&self) -> usize {
        self.cells[0].len()
    }

    /// Cell (i, j), 1-based.
    pub fn cell(&self, i: usize, j: usize) -> &str {
        &self.cells[i - 1][j - 1]
    }

    /// Reads the `.pic` format: `bits=<k> rows=<H> cols=<W>`, then H rows
    /// of W whitespace-separated cells (`.` for the empty string).
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let (n, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing header".into() })?;
        let mut dims = [None; 3];
        for field in header.split_whitespace() {
            let bad = || Error::Parse { line: n + 1, msg: format!("bad header field {field:?}") };
            let (key, value) = field.split_once('=').ok_or_else(bad)?;
            let slot = ["bits", "rows", "cols"].iter().position(|k| *k == key).ok_or_else(bad)?;
            dims[slot] = Some(value.parse::<usize>().map_err(|_| bad())?);
        }
        let [Some(bits), Some(rows), Some(cols)] = dims else {
            return Err(Error::Parse { line: n + 1, msg: "header needs bits, rows and cols".into() });
        };
        let mut cells = Vec::new();
        for (n, line) in lines {
            let row: Vec<String> = line.split_whitespace().map(|c| if c == "." { String::new() } else { c.to_string() }).collect();
            if row.len() != cols {
                return Err(Error::Parse { line: n + 1, msg: format!("expected {cols} cells, found {}", row.len()) });
            }
            cells.push(row);
        }
        if cells.len() != rows {
            return Err(Error::Parse { line: text.lines().count(), msg: format!("expected {rows} rows, found {}", cells.len()) });
        }
        Picture::new(bits, cells)
    }
}

impl fmt::Display for Picture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "bits={} rows={} cols={}", self.bits, self.height(), self.width())?;
        for row in &self.cells {
            let cells: Vec<&str> = row.iter().map(|c| if c.is_empty() { "." } else { c.as_str() }).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

/// Every k-bit picture with at most `max_h` rows and `max_w` columns.
pub fn all_pictures(bits: usize, max_h: usize, max_w: usize) -> Vec<Picture> {
    let values: Vec<String> = crate::graph::all_strings_up_to(bits).filter(|s| s.len() == bits).collect();
    let mut out = Vec::new();
    for h in 1..=max_h {
        for w in 1..=max_w {
            let n = h * w;
            let total = (values.len() as u64).pow(n as u32);
            for mut idx in 0..total {
                let mut flat = Vec::with_capacity(n);
                for _ in 0..n {
                    flat.push(values[(idx % values.len() as u64) as usize].clone());
                    idx /= values.len() as u64;
                }
                let cells = flat.chunks(w).map(<[String]>::to_vec).collect();
                out.push(Picture::new(bits, cells).expect("well-formed"));
            }
        }
    }
    out
}

/// Signature (k, 2): pixels, their set bits, and vertical (→₁) and
/// horizontal (→₂) successors. Elements are in row-major order.
pub fn picture_structure(p: &Picture) -> Structure {
    let (h, w) = (p.height(), p.width());
    let at = |i: usize, j: usize| (i - 1) * w + (j - 1);
    let mut elements = Vec::new();
    let mut unary = vec![Vec::new(); p.bits()];
    let mut links = vec![Vec::new(), Vec::new()];
    for i in 1..=h {
        for j in 1..=w {
            elements.push(Element::Pixel(i, j));
            for (k, b) in p.cell(i, j).bytes().enumerate() {
                if b == b'1' {
                    unary[k].push(at(i, j));
                }
            }
            if i < h {
                links[0].push((at(i, j), at(i + 1, j)));
            }
            if j < w {
                links[1].push((at(i, j), at(i, j + 1)));
            }
        }
    }
    Structure::new(elements, unary, links).expect("pictures are valid structures")
}

/// One entry of a tile: the boundary, or a pixel value with its state.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TileEntry {
    Boundary,
    Cell(String, usize),
}

/// 2×2 tile in the order top-left, top-right, bottom-left, bottom-right.
pub type Tile = [TileEntry; 4];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TilingSystem {
    pub bits: usize,
    pub states: Vec<String>,
    pub tiles: BTreeSet<Tile>,
}

impl TilingSystem {
    pub fn new(bits: usize, states: Vec<String>, tiles: impl IntoIterator<Item = Tile>) -> Result<Self> {
        let tiles: BTreeSet<Tile> = tiles.into_iter().collect();
        for e in tiles.iter().flatten() {
            if let TileEntry::Cell(v, q) = e {
                if v.len() != bits || !v.bytes().all(|b| b == b'0' || b == b'1') || *q >= states.len() {
                    return Err(Error::InvalidPicture(format!("tile entry {v:?}/{q} does not fit the tiling system")));
                }
            }
        }
        Ok(TilingSystem { bits, states, tiles })
    }

    /// One state, and every tile made of boundary symbols and 0-bit cells
    /// in that state.
    pub fn all_tiles() -> Self {
        let opts = [TileEntry::Boundary, TileEntry::Cell(String::new(), 0)];
        let tiles = (0..16).map(|m: usize| std::array::from_fn(|k| opts[m >> k & 1].clone()));
        TilingSystem::new(0, vec!["s".into()], tiles).expect("well-formed")
    }

    /// 0-bit pictures of even width: columns alternate between states `a`
    /// and `b`, starting with `a`, and the last column is in state `b`.
    pub fn even_width() -> Self {
        let (a, b) = (TileEntry::Cell(String::new(), 0), TileEntry::Cell(String::new(), 1));
        let bd = TileEntry::Boundary;
        let mut tiles = Vec::new();
        // Columns: left frame, a/b pairs, right frame.
        let pairs = [(bd.clone(), a.clone()), (a.clone(), b.clone()), (b.clone(), a.clone()), (b.clone(), bd.clone())];
        for (l, r) in pairs {
            let both = |x: &TileEntry, y: &TileEntry| x == &bd && y == &bd;
            if both(&l, &r) {
                continue;
            }
            // top frame row, interior rows, bottom frame row
            tiles.push([bd.clone(), bd.clone(), l.clone(), r.clone()]);
            tiles.push([l.clone(), r.clone(), l.clone(), r.clone()]);
            tiles.push([l.clone(), r.clone(), bd.clone(), bd.clone()]);
        }
        TilingSystem::new(0, vec!["a".into(), "b".into()], tiles).expect("well-formed")
    }

    /// Reads the `.ts` format: `bits <k>` (optional), `state <name>` and
    /// `tile <TL> <TR> <BL> <BR>` lines with entries `B` or `<bits>/<state>`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut bits = None;
        let mut states: Vec<String> = Vec::new();
        let mut raw = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let words: Vec<&str> = line.split_whitespace().collect();
            let err = |msg: String| Error::Parse { line: n + 1, msg };
            match words.as_slice() {
                [] => {}
                [w, ..] if w.starts_with('#') => {}
                ["bits", k] => bits = Some(k.parse::<usize>().map_err(|_| err(format!("bad bit count {k:?}")))?),
                ["state", name] => {
                    if states.iter().any(|s| s == name) {
                        return Err(err(format!("duplicate state {name}")));
                    }
                    states.push(name.to_string());
                }
                ["tile", a, b, c, d] => raw.push((n + 1, [*a, *b, *c, *d])),
                _ => return Err(err(format!("unrecognized line {line:?}"))),
            }
        }
        let mut tiles = Vec::new();
        let mut widths = BTreeSet::new();
        for (line, entries) in raw {
            let mut tile: Vec<TileEntry> = Vec::new();
            for e in entries {
                if e == "B" {
                    tile.push(TileEntry::Boundary);
                    continue;
                }
                let (v, q) = e.split_once('/').ok_or(Error::Parse { line, msg: format!("bad tile entry {e:?}") })?;
                let v = if v == "." { "" } else { v };
                let q = states.iter().position(|s| s == q).ok_or(Error::Parse { line, msg: format!("unknown state {q:?}") })?;
                widths.insert(v.len());
                tile.push(TileEntry::Cell(v.to_string(), q));
            }
            tiles.push(<Tile>::try_from(tile).expect("four entries"));
        }
        let bits = match (bits, widths.len()) {
            (Some(k), _) => k,
            (None, 0) => 0,
            (None, 1) => *widths.first().unwrap(),
            _ => return Err(Error::Parse { line: 1, msg: "tile entries of different lengths".into() }),
        };
        TilingSystem::new(bits, states, tiles)
    }
}

impl fmt::Display for TilingSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "bits {}", self.bits)?;
        for s in &self.states {
            writeln!(f, "state {s}")?;
        }
        for t in &self.tiles {
            let entries: Vec<String> = t
                .iter()
                .map(|e| match e {
                    TileEntry::Boundary => "B".to_string(),
                    TileEntry::Cell(v, q) => format!("{}/{}", if v.is_empty() { "." } else { v }, self.states[*q]),
                })
                .collect();
            writeln!(f, "tile {}", entries.join(" "))?;
        }
        Ok(())
    }
}

/// Backtracking search for a state assignment under which every 2×2 block
/// of the framed picture is a tile. Pixels are filled in row-major order,
/// and each block is checked as soon as its last pixel is placed.
pub fn ts_accepts(t: &TilingSystem, p: &Picture) -> Result<bool> {
    if t.bits != p.bits() {
        return Err(Error::BitWidthMismatch { ts: t.bits, picture: p.bits() });
    }
    let (h, w) = (p.height(), p.width());
    let tiles: HashSet<&Tile> = t.tiles.iter().collect();
    // Framed grid of (H+2)×(W+2); `None` is the boundary.
    let mut grid: Vec<Vec<Option<usize>>> = vec![vec![None; w + 2]; h + 2];
    let entry = |grid: &Vec<Vec<Option<usize>>>, i: usize, j: usize| match grid[i][j] {
        None => TileEntry::Boundary,
        Some(q) => TileEntry::Cell(p.cell(i, j).to_string(), q),
    };
    let block_ok = |grid: &Vec<Vec<Option<usize>>>, i: usize, j: usize| {
        let tile = [entry(grid, i - 1, j - 1), entry(grid, i - 1, j), entry(grid, i, j - 1), entry(grid, i, j)];
        tiles.contains(&tile)
    };
    fn search(
        k: usize,
        h: usize,
        w: usize,
        states: usize,
        grid: &mut Vec<Vec<Option<usize>>>,
        block_ok: &dyn Fn(&Vec<Vec<Option<usize>>>, usize, usize) -> bool,
    ) -> bool {
        if k == h * w {
            return true;
        }
        let (i, j) = (k / w + 1, k % w + 1);
        for q in 0..states {
            grid[i][j] = Some(q);
            let mut ok = block_ok(grid, i, j);
            ok = ok && (j < w || block_ok(grid, i, j + 1));
            ok = ok && (i < h || block_ok(grid, i + 1, j));
            ok = ok && (i < h || j < w || block_ok(grid, i + 1, j + 1));
            if ok && search(k + 1, h, w, states, grid, block_ok) {
                return true;
            }
        }
        grid[i][j] = None;
        false
    }
    Ok(search(0, h, w, t.states.len(), &mut grid, &block_ok))
}

fn state_var(q: usize) -> String {
    format!("Q{q}")
}

/// x has value `v` and state `q`.
fn matches(v: &str, q: usize, x: &str) -> Formula {
    let bits = v.bytes().enumerate().map(|(k, b)| if b == b'1' { bit(k + 1, x) } else { not(bit(k + 1, x)) });
    and_all(bits.chain([rel(&state_var(q), &[x])]))
}

/// y is the pixel reached from x by `di` vertical and then `dj`
/// horizontal steps (each −1, 0 or 1), and `inner` holds of it.
fn offset(x: &str, di: i32, dj: i32, inner: &dyn Fn(&str) -> Formula) -> Formula {
    let step = |from: &str, to: &str, i: usize, d: i32| if d > 0 { link(i, from, to) } else { link(i, to, from) };
    match (di, dj) {
        (0, 0) => inner(x),
        (0, _) => exists_adj("h", x, and(step(x, "h", 2, dj), inner("h"))),
        (_, 0) => exists_adj("v", x, and(step(x, "v", 1, di), inner("v"))),
        _ => exists_adj("v", x, and(step(x, "v", 1, di), exists_adj("h", "v", and(step("v", "h", 2, dj), inner("h"))))),
    }
}

/// Every 2×2 block of the framed picture that contains pixel x, where x
/// sits at (a, b) inside the block, is one of the tiles.
fn block_at(t: &TilingSystem, x: &str, a: usize, b: usize) -> Formula {
    let alternatives = t.tiles.iter().filter_map(|tile| {
        let TileEntry::Cell(v, q) = &tile[2 * a + b] else { return None };
        let mut parts = vec![matches(v, *q, x)];
        for (c, d) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            if (c, d) == (a, b) {
                continue;
            }
            let (di, dj) = (c as i32 - a as i32, d as i32 - b as i32);
            parts.push(match &tile[2 * c + d] {
                TileEntry::Boundary => not(offset(x, di, dj, &|_| tt())),
                TileEntry::Cell(v, q) => offset(x, di, dj, &|y| matches(v, *q, y)),
            });
        }
        Some(and_all(parts))
    });
    or_all(alternatives)
}

/// ∃(Q_q) ∀x (OneState(x) ∧ LegalTiling(x)), true on exactly the
/// pictures the tiling system accepts.
pub fn ts_to_formula(t: &TilingSystem) -> Formula {
    let x = "x";
    let n = t.states.len();
    let some = or_all((0..n).map(|q| rel(&state_var(q), &[x])));
    let mut at_most = Vec::new();
    for q in 0..n {
        for r in q + 1..n {
            at_most.push(not(and(rel(&state_var(q), &[x]), rel(&state_var(r), &[x]))));
        }
    }
    let one_state = and(some, and_all(at_most));
    let legal = and_all([(0, 0), (0, 1), (1, 0), (1, 1)].map(|(a, b)| block_at(t, x, a, b)));
    let vars: Vec<String> = (0..n).map(state_var).collect();
    let vars: Vec<(&str, usize)> = vars.iter().map(|v| (v.as_str(), 1)).collect();
    so_block(Quant::Exists, &vars, forall(x, and(one_state, legal)))
}

pub const PORTS: [(&str, &str); 4] = [("in1", "00"), ("in2", "01"), ("out1", "10"), ("out2", "11")];

pub fn pixel_node(i: usize, j: usize, part: &str) -> String {
    format!("p{i}_{j}_{part}")
}

/// Five nodes per pixel: a center `pxl` joined to four ports, with
/// out₁–in₁ edges between vertical neighbors and out₂–in₂ edges between
/// horizontal ones.
pub fn encode_picture_as_graph(p: &Picture) -> Result<LabeledGraph> {
    if p.bits() != 0 {
        return Err(Error::NonZeroBits);
    }
    let (h, w) = (p.height(), p.width());
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    for i in 1..=h {
        for j in 1..=w {
            nodes.push((pixel_node(i, j, "pxl"), String::new()));
            for (port, label) in PORTS {
                nodes.push((pixel_node(i, j, port), label.to_string()));
                edges.push((pixel_node(i, j, "pxl"), pixel_node(i, j, port)));
            }
            if i < h {
                edges.push((pixel_node(i, j, "out1"), pixel_node(i + 1, j, "in1")));
            }
            if j < w {
                edges.push((pixel_node(i, j, "out2"), pixel_node(i, j + 1, "in2")));
            }
        }
    }
    LabeledGraph::new(nodes, edges)
}

/// Names introduced by the translation, kept apart from the input's.
struct Fresh {
    avoid: BTreeSet<String>,
}

impl Fresh {
    fn name(&mut self, base: &str) -> String {
        fresh_name(base, &mut self.avoid)
    }

    /// x is a pixel center: it has no labeling bits.
    fn is_pixel(&mut self, x: &str) -> Formula {
        let y = self.name("c");
        not(exists_adj(&y, x, or(link(2, x, &y), link(2, &y, x))))
    }

    /// The i-th labeling bit of node x has value `value`.
    fn has_bit(&mut self, x: &str, i: usize, value: bool) -> Formula {
        let (y, z) = (self.name("b"), self.name("b"));
        let pos = if i == 1 { link(1, &y, &z) } else { link(1, &z, &y) };
        let at = and(link(2, x, &y), exists_adj(&z, x, pos));
        let b = if value { bit(1, &y) } else { not(bit(1, &y)) };
        exists_adj(&y, x, and(at, b))
    }

    /// x is the port labeled `label`.
    fn is_port(&mut self, x: &str, label: &str) -> Formula {
        let b: Vec<bool> = label.bytes().map(|c| c == b'1').collect();
        and(self.has_bit(x, 1, b[0]), self.has_bit(x, 2, b[1]))
    }

    fn translate(&mut self, f: &Formula) -> Result<Formula> {
        Ok(match f {
            Formula::Const(_) | Formula::Eq(..) | Formula::Rel(..) => f.clone(),
            Formula::Bit(..) => return Err(Error::SignatureMismatch("0-bit pictures have no bit predicates".into())),
            Formula::Link(i, x, y) => {
                if !(1..=2).contains(i) {
                    return Err(Error::SignatureMismatch(format!("pictures have no →{i}")));
                }
                let (out, inp) = if *i == 1 { ("10", "00") } else { ("11", "01") };
                let (z1, z2) = (self.name("o"), self.name("i"));
                let chain = and_all([
                    self.is_port(&z1, out),
                    self.is_port(&z2, inp),
                    link(1, x, &z1),
                    link(1, &z1, &z2),
                    link(1, &z2, y),
                ]);
                exists_adj(&z1, x, exists_adj(&z2, &z1, chain))
            }
            Formula::Not(a) => not(self.translate(a)?),
            Formula::And(a, b) => and(self.translate(a)?, self.translate(b)?),
            Formula::Or(a, b) => or(self.translate(a)?, self.translate(b)?),
            Formula::Implies(a, b) => implies(self.translate(a)?, self.translate(b)?),
            Formula::Iff(a, b) => iff(self.translate(a)?, self.translate(b)?),
            Formula::So { q, var, arity, body } => {
                Formula::So { q: *q, var: var.clone(), arity: *arity, body: Box::new(self.translate(body)?) }
            }
            Formula::Fo { node: true, .. } => {
                return Err(Error::Unsupported("node-restricted quantifier on pictures".into()))
            }
            Formula::Fo { q, var, range, body, .. } => {
                let pixel = self.is_pixel(var);
                let body = self.translate(body)?;
                let (range, guard) = match range {
                    Range::All => (Range::All, pixel),
                    Range::Adjacent(a) => (Range::Within(a.clone(), 3), and(neq(var, a), pixel)),
                    Range::Within(a, r) => (Range::Within(a.clone(), 3 * r), pixel),
                };
                let body = match q {
                    Quant::Exists => and(guard, body),
                    Quant::Forall => implies(guard, body),
                };
                Formula::Fo { q: *q, var: var.clone(), range, node: false, body: Box::new(body) }
            }
        })
    }
}

/// Sentence over graphs true on the encoding of a 0-bit picture iff `f`
/// is true on the picture. First-order quantifiers are relativized to
/// pixel centers, and →ᵢ becomes a path through an outᵢ and an inᵢ port.
pub fn translate_picture_formula(f: &Formula) -> Result<Formula> {
    crate::logic::classify(f)?;
    let mut fresh = Fresh { avoid: f.all_names() };
    fresh.translate(f)
}
