//! Sweep specifications: a transition-matrix template with named slots,
//! ranges for the slots and admissibility constraints.

use anyhow::{Context, Result, bail, ensure};
use evalexpr::{ContextWithMutableVariables, DefaultNumericTypes, HashMapContext, Node, Value, build_operator_tree};
use mad_capacity::structure::Side;
use mad_capacity::{Decay, TransitionMatrix};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Slot {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

/// One entry `γ_{from,to}` of the template, as an expression in the slots.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemplateEntry {
    pub from: usize,
    pub to: usize,
    pub expr: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Analysis {
    Classify,
    Capacity,
    Monotonicity,
    Mad3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SideSpec {
    Left,
    Right,
}

impl From<SideSpec> for Side {
    fn from(s: SideSpec) -> Self {
        match s {
            SideSpec::Left => Side::Left,
            SideSpec::Right => Side::Right,
        }
    }
}

/// Compares the channel with the one whose entry `(from, to)` is raised by `delta`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonotonicitySpec {
    pub from: usize,
    pub to: usize,
    pub delta: String,
    pub side: SideSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub dim: usize,
    pub template: Vec<TemplateEntry>,
    pub slots: Vec<Slot>,
    #[serde(default)]
    pub constraints: Vec<String>,
    pub analyses: Vec<Analysis>,
    #[serde(default)]
    pub monotonicity: Option<MonotonicitySpec>,
    /// Iterations of the anchor sequence used by the `mad3` analysis.
    #[serde(default = "default_iterations")]
    pub mad3_iterations: usize,
}

fn default_iterations() -> usize {
    4
}

/// A grid point: slot values in slot order.
pub type Coords = Vec<f64>;

pub enum Instance {
    Admissible { gamma: TransitionMatrix, raised: Option<std::result::Result<TransitionMatrix, String>> },
    Skipped(String),
}

/// Compiled specification.
pub struct Sweep {
    pub spec: SweepSpec,
    entries: Vec<(usize, usize, Node<DefaultNumericTypes>)>,
    constraints: Vec<(String, Node<DefaultNumericTypes>)>,
    delta: Option<Node<DefaultNumericTypes>>,
}

/// Rewrites every numeric literal as a plain decimal float: `1/2` then
/// means one half, and exponent forms such as `1e-9` become parseable.
pub fn normalize_literals(expr: &str) -> String {
    let chars: Vec<char> = expr.chars().collect();
    let digit_at = |k: usize| chars.get(k).is_some_and(|c| c.is_ascii_digit());
    let mut out = String::with_capacity(expr.len() + 8);
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        let after_ident = i > 0 && (chars[i - 1].is_alphanumeric() || chars[i - 1] == '_');
        let starts_number = !after_ident && (ch.is_ascii_digit() || (ch == '.' && digit_at(i + 1)));
        if !starts_number {
            out.push(ch);
            i += 1;
            continue;
        }
        let start = i;
        while digit_at(i) {
            i += 1;
        }
        if chars.get(i) == Some(&'.') {
            i += 1;
            while digit_at(i) {
                i += 1;
            }
        }
        if matches!(chars.get(i), Some('e' | 'E')) {
            let sign = usize::from(matches!(chars.get(i + 1), Some('+' | '-')));
            if digit_at(i + 1 + sign) {
                i += 1 + sign;
                while digit_at(i) {
                    i += 1;
                }
            }
        }
        let token: String = chars[start..i].iter().collect();
        match token.parse::<f64>() {
            Ok(v) => {
                let text = format!("{v}");
                out.push_str(&text);
                if !text.contains('.') {
                    out.push_str(".0");
                }
            }
            Err(_) => out.push_str(&token),
        }
    }
    out
}

fn compile(expr: &str) -> Result<Node<DefaultNumericTypes>> {
    build_operator_tree::<DefaultNumericTypes>(&normalize_literals(expr))
        .with_context(|| format!("cannot parse expression `{expr}`"))
}

impl Sweep {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: SweepSpec = serde_json::from_str(text).context("malformed sweep specification")?;
        Self::new(spec)
    }

    pub fn new(spec: SweepSpec) -> Result<Self> {
        ensure!(spec.dim >= 1, "dim must be positive");
        ensure!(!spec.slots.is_empty(), "at least one slot is required");
        ensure!(!spec.analyses.is_empty(), "at least one analysis is required");
        let mut names = std::collections::HashSet::new();
        for s in &spec.slots {
            ensure!(names.insert(s.name.as_str()), "slot `{}` declared twice", s.name);
            ensure!(s.step > 0.0 && s.step.is_finite(), "slot `{}` needs a positive step", s.name);
            ensure!(s.min.is_finite() && s.max.is_finite() && s.min <= s.max, "slot `{}` has an empty range", s.name);
        }
        let mut entries = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for e in &spec.template {
            ensure!(e.from < spec.dim && e.to < e.from, "template entry {}->{} is not a downward decay", e.from, e.to);
            ensure!(seen.insert((e.from, e.to)), "template entry {}->{} given twice", e.from, e.to);
            entries.push((e.from, e.to, compile(&e.expr)?));
        }
        let constraints = spec.constraints.iter().map(|c| Ok((c.clone(), compile(c)?))).collect::<Result<_>>()?;
        let needs_mono = spec.analyses.contains(&Analysis::Monotonicity);
        let delta = match (&spec.monotonicity, needs_mono) {
            (Some(m), _) => {
                ensure!(
                    m.from < spec.dim && m.to < m.from,
                    "monotonicity entry {}->{} is not a downward decay",
                    m.from,
                    m.to
                );
                Some(compile(&m.delta)?)
            }
            (None, true) => bail!("the monotonicity analysis needs a `monotonicity` block"),
            (None, false) => None,
        };
        if spec.analyses.contains(&Analysis::Mad3) {
            ensure!(spec.dim == 3, "the mad3 analysis needs dim = 3");
        }
        let sweep = Self { spec, entries, constraints, delta };
        // Surface unknown identifiers before any work starts.
        let probe: Coords = sweep.spec.slots.iter().map(|s| s.min).collect();
        let ctx = sweep.context(&probe)?;
        for (_, _, node) in &sweep.entries {
            node.eval_number_with_context(&ctx).context("template expression failed at the first grid point")?;
        }
        Ok(sweep)
    }

    pub fn slot_names(&self) -> Vec<&str> {
        self.spec.slots.iter().map(|s| s.name.as_str()).collect()
    }

    /// Grid values of one slot; values are rounded to 12 decimals so that
    /// `0.1 + 0.2` prints as `0.3`.
    fn axis(slot: &Slot) -> Vec<f64> {
        let n = ((slot.max - slot.min) / slot.step + 1e-9).floor() as usize;
        (0..=n).map(|k| ((slot.min + k as f64 * slot.step) * 1e12).round() / 1e12).collect()
    }

    /// All grid points in lexicographic order, first slot slowest.
    pub fn grid(&self) -> Vec<Coords> {
        let axes: Vec<Vec<f64>> = self.spec.slots.iter().map(Self::axis).collect();
        let mut out = vec![Vec::new()];
        for axis in &axes {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    axis.iter().map(move |&v| {
                        let mut p = prefix.clone();
                        p.push(v);
                        p
                    })
                })
                .collect();
        }
        out
    }

    fn context(&self, coords: &[f64]) -> Result<HashMapContext<DefaultNumericTypes>> {
        let mut ctx = HashMapContext::<DefaultNumericTypes>::new();
        for (slot, &v) in self.spec.slots.iter().zip(coords) {
            ctx.set_value(slot.name.clone(), Value::Float(v))?;
        }
        Ok(ctx)
    }

    pub fn instantiate(&self, coords: &[f64]) -> Instance {
        match self.try_instantiate(coords) {
            Ok(i) => i,
            Err(e) => Instance::Skipped(format!("{e:#}")),
        }
    }

    fn try_instantiate(&self, coords: &[f64]) -> Result<Instance> {
        let ctx = self.context(coords)?;
        for (text, node) in &self.constraints {
            if !node.eval_boolean_with_context(&ctx).with_context(|| format!("constraint `{text}`"))? {
                return Ok(Instance::Skipped(format!("constraint `{text}` fails")));
            }
        }
        let decays = self
            .entries
            .iter()
            .map(|(from, to, node)| Ok(Decay { from: *from, to: *to, p: node.eval_number_with_context(&ctx)? }))
            .collect::<Result<Vec<_>>>()?;
        let gamma = TransitionMatrix::from_decays(self.spec.dim, &decays)?;
        let raised = match (&self.spec.monotonicity, &self.delta) {
            (Some(m), Some(node)) => {
                let delta = node.eval_number_with_context(&ctx)?;
                let p = gamma.get(m.from, m.to) + delta;
                Some(gamma.with_decay(m.from, m.to, p).map_err(|e| e.to_string()))
            }
            _ => None,
        };
        Ok(Instance::Admissible { gamma, raised })
    }
}
