use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Tape alphabet {▷, ␣, ⌗, 0, 1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sym {
    Start,
    Blank,
    Sep,
    Zero,
    One,
}

impl Sym {
    pub fn from_char(c: char) -> Option<Sym> {
        Some(match c {
            '>' | '▷' => Sym::Start,
            '_' | '␣' => Sym::Blank,
            '#' | '⌗' => Sym::Sep,
            '0' => Sym::Zero,
            '1' => Sym::One,
            _ => return None,
        })
    }

    pub fn to_char(self) -> char {
        match self {
            Sym::Start => '>',
            Sym::Blank => '_',
            Sym::Sep => '#',
            Sym::Zero => '0',
            Sym::One => '1',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    L,
    S,
    R,
}

impl Move {
    fn parse(s: &str) -> Option<Move> {
        Some(match s {
            "L" => Move::L,
            "S" => Move::S,
            "R" => Move::R,
            _ => return None,
        })
    }
}

pub const QSTART: usize = 0;
pub const QPAUSE: usize = 1;
pub const QSTOP: usize = 2;

/// δ(q, r, i, s) = (q', i', s', Dr, Di, Ds). The receiving tape is read-only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transition {
    pub next: usize,
    pub write_internal: Sym,
    pub write_send: Sym,
    pub moves: [Move; 3],
}

/// Distributed Turing machine with receiving, internal and sending tapes.
#[derive(Debug, Clone)]
pub struct Machine {
    states: Vec<String>,
    index: HashMap<String, usize>,
    delta: HashMap<(usize, [Sym; 3]), Transition>,
}

impl Machine {
    /// `states` may omit the reserved qstart, qpause and qstop.
    pub fn new(states: &[&str], transitions: &[(&str, [Sym; 3], &str, Sym, Sym, [Move; 3])]) -> Result<Self> {
        let mut m = Machine::empty();
        for s in states {
            m.add_state(s);
        }
        for &(q, read, q2, wi, ws, moves) in transitions {
            let from = m.state_index(q)?;
            let next = m.state_index(q2)?;
            m.add_transition(from, read, Transition { next, write_internal: wi, write_send: ws, moves })?;
        }
        Ok(m)
    }

    fn empty() -> Self {
        let mut m = Machine { states: Vec::new(), index: HashMap::new(), delta: HashMap::new() };
        for s in ["qstart", "qpause", "qstop"] {
            m.add_state(s);
        }
        m
    }

    fn add_state(&mut self, name: &str) {
        if !self.index.contains_key(name) {
            self.index.insert(name.to_string(), self.states.len());
            self.states.push(name.to_string());
        }
    }

    fn state_index(&self, name: &str) -> Result<usize> {
        self.index.get(name).copied().ok_or_else(|| Error::InvalidMachine(format!("undeclared state {name}")))
    }

    fn add_transition(&mut self, from: usize, read: [Sym; 3], t: Transition) -> Result<()> {
        let name = &self.states[from];
        if from == QSTOP {
            return Err(Error::InvalidMachine("transition out of qstop".into()));
        }
        for (tape, (&r, w)) in read[1..].iter().zip([t.write_internal, t.write_send]).enumerate() {
            if (r == Sym::Start) != (w == Sym::Start) {
                return Err(Error::InvalidMachine(format!(
                    "state {name}: ▷ must be kept in place and never written elsewhere (tape {})",
                    tape + 1
                )));
            }
        }
        for (k, &r) in read.iter().enumerate() {
            if r == Sym::Start && t.moves[k] == Move::L {
                return Err(Error::InvalidMachine(format!("state {name}: left move off the leftmost cell")));
            }
        }
        if self.delta.insert((from, read), t).is_some() {
            return Err(Error::InvalidMachine(format!("state {name}: duplicate transition")));
        }
        Ok(())
    }

    pub fn state_name(&self, q: usize) -> &str {
        &self.states[q]
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn transition(&self, q: usize, read: [Sym; 3]) -> Option<&Transition> {
        self.delta.get(&(q, read))
    }

    /// Parses the `.dtm` format.
    pub fn parse(text: &str) -> Result<Self> {
        let mut m = Machine::empty();
        let mut pending = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let err = |msg: String| Error::Parse { line, msg };
            let t = raw.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = t.split_whitespace().collect();
            match toks[0] {
                "state" if toks.len() == 2 => m.add_state(toks[1]),
                "trans" => {
                    if toks.len() != 12 || toks[5] != "->" {
                        return Err(err("expected: trans q r i s -> q' i' s' Dr Di Ds".into()));
                    }
                    let sym = |s: &str| {
                        let mut cs = s.chars();
                        match (cs.next().and_then(Sym::from_char), cs.next()) {
                            (Some(x), None) => Ok(x),
                            _ => Err(err(format!("bad symbol {s:?}"))),
                        }
                    };
                    let mv = |s: &str| Move::parse(s).ok_or_else(|| err(format!("bad move {s:?}")));
                    let read = [sym(toks[2])?, sym(toks[3])?, sym(toks[4])?];
                    let moves = [mv(toks[9])?, mv(toks[10])?, mv(toks[11])?];
                    pending.push((line, toks[1].to_string(), read, toks[6].to_string(), sym(toks[7])?, sym(toks[8])?, moves));
                }
                other => return Err(err(format!("unknown directive {other:?}"))),
            }
        }
        for (line, q, read, q2, wi, ws, moves) in pending {
            let wrap = |e: Error| Error::Parse { line, msg: e.to_string() };
            let from = m.state_index(&q).map_err(wrap)?;
            let next = m.state_index(&q2).map_err(wrap)?;
            m.add_transition(from, read, Transition { next, write_internal: wi, write_send: ws, moves }).map_err(wrap)?;
        }
        Ok(m)
    }
}

/// One tape: cell 0 holds ▷; cells beyond the end read as blank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tape {
    pub cells: Vec<Sym>,
    pub head: usize,
}

impl Tape {
    pub fn new(content: &[Sym]) -> Self {
        let mut cells = vec![Sym::Start];
        cells.extend_from_slice(content);
        Tape { cells, head: 0 }
    }

    pub fn from_str(content: &str) -> Self {
        Tape::new(&content.chars().filter_map(Sym::from_char).collect::<Vec<_>>())
    }

    pub fn read(&self) -> Sym {
        self.cells.get(self.head).copied().unwrap_or(Sym::Blank)
    }

    fn write(&mut self, s: Sym) {
        if self.head >= self.cells.len() {
            self.cells.resize(self.head + 1, Sym::Blank);
        }
        self.cells[self.head] = s;
    }

    fn shift(&mut self, m: Move, name: &'static str) -> Result<()> {
        match m {
            Move::L if self.head == 0 => return Err(Error::HeadUnderflow(name)),
            Move::L => self.head -= 1,
            Move::S => {}
            Move::R => self.head += 1,
        }
        Ok(())
    }

    /// Content after ▷ with trailing blanks dropped.
    pub fn content(&self) -> String {
        let s: String = self.cells[1..].iter().map(|s| s.to_char()).collect();
        s.trim_end_matches('_').to_string()
    }

    /// Number of cells touched, ▷ included.
    pub fn used(&self) -> usize {
        self.cells.len().max(self.head + 1)
    }
}

impl fmt::Display for Tape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, ">{}", self.content())
    }
}

/// Complete local configuration of a node during phase 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub state: usize,
    pub receiving: Tape,
    pub internal: Tape,
    pub sending: Tape,
}

/// Applies δ once.
pub fn step_local(m: &Machine, cfg: &Config) -> Result<Config> {
    if cfg.state == QPAUSE || cfg.state == QSTOP {
        return Err(Error::NotRunning);
    }
    let read = [cfg.receiving.read(), cfg.internal.read(), cfg.sending.read()];
    let t = m.transition(cfg.state, read).ok_or_else(|| Error::UndefinedTransition {
        state: m.state_name(cfg.state).to_string(),
        r: read[0].to_char(),
        i: read[1].to_char(),
        s: read[2].to_char(),
    })?;
    let mut next = cfg.clone();
    next.state = t.next;
    next.internal.write(t.write_internal);
    next.sending.write(t.write_send);
    next.receiving.shift(t.moves[0], "receiving")?;
    next.internal.shift(t.moves[1], "internal")?;
    next.sending.shift(t.moves[2], "sending")?;
    debug_assert_eq!(next.receiving.cells, cfg.receiving.cells);
    Ok(next)
}
