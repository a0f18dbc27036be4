//! Problem files: loading, validation and diagnostics.
//!
//! A problem file is one JSON object (comments and trailing commas are
//! accepted) describing one task. See `docs/schema.json`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use json_spanned_value::spanned;
use json_spanned_value::Value as Node;
use serde_json::Value as Json;

use locdyn_core::bch::NilpotentLieAlgebra;
use locdyn_core::fixtures::TruncatedSeriesMap;
use locdyn_core::{Element, FieldKind, FieldSpec, Matrix, Rational};

use crate::syntax::{parse_element, parse_rational};

/// Largest accepted dimension.
pub const MAX_DIM: usize = 16;
pub const DEFAULT_PRECISION: i32 = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, clap::ValueEnum)]
pub enum Task {
    Scale,
    Decompose,
    AdaptedNorm,
    Tidy,
    Classify,
    Orbit,
    BchScale,
    Fixture,
    Diffquot,
}

impl Task {
    pub const ALL: [Task; 9] = [
        Task::Scale,
        Task::Decompose,
        Task::AdaptedNorm,
        Task::Tidy,
        Task::Classify,
        Task::Orbit,
        Task::BchScale,
        Task::Fixture,
        Task::Diffquot,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::Scale => "scale",
            Task::Decompose => "decompose",
            Task::AdaptedNorm => "adapted-norm",
            Task::Tidy => "tidy",
            Task::Classify => "classify",
            Task::Orbit => "orbit",
            Task::BchScale => "bch-scale",
            Task::Fixture => "fixture",
            Task::Diffquot => "diffquot",
        }
    }

    pub fn from_name(s: &str) -> Option<Task> {
        Task::ALL.into_iter().find(|t| t.name() == s)
    }

    fn params(self) -> &'static [&'static str] {
        match self {
            Task::Scale => &["radii"],
            Task::Decompose => &[],
            Task::AdaptedNorm => &["vectors", "samples", "radius"],
            Task::Tidy => &["radius", "norm", "samples"],
            Task::Classify => &["vector", "steps"],
            Task::Orbit => &["vector", "steps", "norm"],
            Task::BchScale => &["level", "samples"],
            Task::Fixture => &["name", "p", "window", "precision", "samples", "exponents", "n_max"],
            Task::Diffquot => &["map", "a", "x", "y", "jmax", "exponents"],
        }
    }

    fn needs_matrix(self) -> bool {
        !matches!(self, Task::Fixture | Task::Diffquot)
    }

    fn needs_field(self) -> bool {
        self != Task::Fixture
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One problem with the input, located in the file when possible.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Diagnostic {
    /// 1-based; `None` for values given on the command line.
    pub line: Option<usize>,
    pub column: Option<usize>,
    /// JSON pointer of the offending field, or the flag name.
    pub field: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "line {l}, column {c}: {}: {}", self.field, self.message),
            _ => write!(f, "{}: {}", self.field, self.message),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormChoice {
    Adapted,
    Max,
}

impl NormChoice {
    pub fn name(self) -> &'static str {
        match self {
            NormChoice::Adapted => "adapted",
            NormChoice::Max => "max",
        }
    }
}

#[derive(Clone, Debug)]
pub enum FixtureInput {
    Shift { p: u32, window: usize },
    FrobeniusTwist { p: u32, precision: i32, samples: usize },
    Nonanalytic { p: u32, precision: i32, exponents: Option<Vec<i32>>, n_max: Option<i32> },
}

/// Task parameters after validation.
#[derive(Clone, Debug)]
pub enum TaskInput {
    Scale { radii: Vec<Rational> },
    Decompose,
    AdaptedNorm { vectors: Vec<Vec<Element>>, samples: usize, radius: Option<Rational> },
    Tidy { radius: Rational, norm: NormChoice, samples: usize },
    Classify { vector: Vec<Element>, steps: usize },
    Orbit { vector: Vec<Element>, steps: usize, norm: NormChoice },
    BchScale { level: i32, samples: usize },
    Fixture(FixtureInput),
    Diffquot { map: TruncatedSeriesMap, x: Element, y: Element, jmax: i32 },
}

#[derive(Clone, Debug)]
pub struct Problem {
    pub task: Task,
    pub spec: Option<Arc<FieldSpec>>,
    pub matrix: Option<Matrix>,
    pub algebra: Option<NilpotentLieAlgebra>,
    pub input: TaskInput,
}

/// Settings given on the command line, overriding the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub task: Option<Task>,
    pub precision: Option<i32>,
    /// `params` entries, applied in order.
    pub params: Vec<(String, Json)>,
}

// ---------------------------------------------------------------------------
// source locations

struct Source {
    line_starts: Vec<usize>,
}

impl Source {
    fn new(text: &str) -> Source {
        let mut line_starts = vec![0];
        line_starts.extend(text.bytes().enumerate().filter(|(_, b)| *b == b'\n').map(|(i, _)| i + 1));
        Source { line_starts }
    }

    fn locate(&self, offset: usize) -> (usize, usize) {
        let line = self.line_starts.partition_point(|&s| s <= offset);
        (line, offset - self.line_starts[line - 1] + 1)
    }
}

/// A parameter value with its origin.
#[derive(Clone, Debug)]
enum Origin {
    File(usize),
    Flag,
}

#[derive(Clone, Debug)]
struct Param {
    value: Json,
    origin: Origin,
    /// Start offset of every array element (or object member value) one
    /// level down, when known.
    children: Vec<usize>,
}

struct Ctx<'a> {
    src: Source,
    text: &'a str,
    diags: Vec<Diagnostic>,
}

impl Ctx<'_> {
    fn at(&mut self, offset: Option<usize>, field: &str, message: impl Into<String>) {
        let (line, column) = match offset {
            Some(o) => {
                let (l, c) = self.src.locate(o);
                (Some(l), Some(c))
            }
            None => (None, None),
        };
        self.diags.push(Diagnostic { line, column, field: field.to_string(), message: message.into() });
    }

    fn node(&mut self, n: &spanned::Value, field: &str, message: impl Into<String>) {
        self.at(Some(n.start()), field, message);
    }

    fn param(&mut self, p: &Param, child: Option<usize>, field: &str, message: impl Into<String>) {
        match p.origin {
            Origin::File(o) => {
                let o = child.and_then(|i| p.children.get(i).copied()).unwrap_or(o);
                self.at(Some(o), field, message)
            }
            Origin::Flag => self.at(None, field, message),
        }
    }

    /// The text of a string or number node.
    fn scalar_text(&mut self, n: &spanned::Value, field: &str) -> Option<String> {
        match n.get_ref() {
            Node::String(s) => Some(s.clone()),
            Node::Number(_) => Some(self.text[n.range()].trim().to_string()),
            other => {
                self.node(n, field, format!("expected a string or number, found {}", other.type_str()));
                None
            }
        }
    }
}

fn json_type(v: &Json) -> &'static str {
    match v {
        Json::Null => "null",
        Json::Bool(_) => "boolean",
        Json::Number(_) => "number",
        Json::String(_) => "string",
        Json::Array(_) => "array",
        Json::Object(_) => "object",
    }
}

fn to_json(n: &spanned::Value) -> Json {
    match n.get_ref() {
        Node::Null => Json::Null,
        Node::Bool(b) => Json::Bool(*b),
        Node::Number(x) => Json::Number(x.clone()),
        Node::String(s) => Json::String(s.clone()),
        Node::Array(a) => Json::Array(a.iter().map(to_json).collect()),
        Node::Object(o) => Json::Object(o.iter().map(|(k, v)| (k.get_ref().clone(), to_json(v))).collect()),
    }
}

fn parse_settings() -> json_spanned_value::Settings {
    json_spanned_value::Settings { allow_comments: true, allow_trailing_comma: true, ..Default::default() }
}

// ---------------------------------------------------------------------------
// loading

/// Loads and validates a problem. `text = None` means no input file: every
/// setting comes from the overrides.
pub fn load(text: Option<&str>, ov: &Overrides) -> Result<Problem, Vec<Diagnostic>> {
    let body = text.unwrap_or("{}");
    let mut ctx = Ctx { src: Source::new(body), text: body, diags: Vec::new() };
    let root: spanned::Value = match json_spanned_value::from_str_with_settings(body, &parse_settings()) {
        Ok(v) => v,
        Err(e) => {
            return Err(vec![Diagnostic {
                line: Some(e.line()),
                column: Some(e.column()),
                field: "/".into(),
                message: format!("invalid JSON: {e}"),
            }]);
        }
    };
    let problem = build(&mut ctx, &root, ov);
    match problem {
        Some(p) if ctx.diags.is_empty() => Ok(p),
        _ => {
            let mut d = ctx.diags;
            d.sort();
            d.dedup();
            Err(d)
        }
    }
}

/// Diagnostics only; an empty list means the file is well formed.
pub fn validate(text: &str) -> Vec<Diagnostic> {
    match load(Some(text), &Overrides::default()) {
        Ok(_) => Vec::new(),
        Err(d) => d,
    }
}

const TOP_KEYS: [&str; 6] = ["task", "field", "matrix", "algebra", "params", "comment"];

fn build(ctx: &mut Ctx, root: &spanned::Value, ov: &Overrides) -> Option<Problem> {
    let Some(obj) = root.as_object() else {
        ctx.node(root, "/", format!("expected an object, found {}", root.type_str()));
        return None;
    };
    for (k, _) in obj.iter() {
        if !TOP_KEYS.contains(&k.get_ref().as_str()) {
            ctx.at(Some(k.start()), &format!("/{}", k.get_ref()), "unknown key");
        }
    }
    let task = match (ov.task, obj.get("task")) {
        (Some(t), _) => Some(t),
        (None, Some(n)) => match n.as_string() {
            Some(s) => match Task::from_name(s) {
                Some(t) => Some(t),
                None => {
                    let names: Vec<&str> = Task::ALL.iter().map(|t| t.name()).collect();
                    ctx.node(n, "/task", format!("unknown task '{s}' (expected one of {})", names.join(", ")));
                    None
                }
            },
            None => {
                ctx.node(n, "/task", "expected a string");
                None
            }
        },
        (None, None) => {
            ctx.at(None, "/task", "no task given (set \"task\" in the file or pass --task)");
            None
        }
    };

    let spec = match obj.get("field") {
        Some(n) => field_block(ctx, n, ov.precision),
        None => None,
    };

    let mut params = BTreeMap::new();
    if let Some(n) = obj.get("params") {
        match n.as_object() {
            Some(o) => {
                for (k, v) in o.iter() {
                    let children = match v.get_ref() {
                        Node::Array(a) => a.iter().map(|c| c.start()).collect(),
                        _ => Vec::new(),
                    };
                    params.insert(
                        k.get_ref().clone(),
                        (Param { value: to_json(v), origin: Origin::File(v.start()), children }, Some(k.start())),
                    );
                }
            }
            None => ctx.node(n, "/params", format!("expected an object, found {}", n.type_str())),
        }
    }
    for (k, v) in &ov.params {
        params.insert(k.clone(), (Param { value: v.clone(), origin: Origin::Flag, children: Vec::new() }, None));
    }

    let task = task?;
    for (k, (_, key_at)) in &params {
        if !task.params().contains(&k.as_str()) {
            let field = format!("/params/{k}");
            let msg = match task.params() {
                [] => format!("'{k}' is not a parameter of task {task} (it takes none)"),
                ps => format!("'{k}' is not a parameter of task {task} (accepted: {})", ps.join(", ")),
            };
            match key_at {
                Some(o) => ctx.at(Some(*o), &field, msg),
                None => ctx.at(None, &format!("--set {k}"), msg),
            }
        }
    }
    let params: BTreeMap<String, Param> = params.into_iter().map(|(k, (p, _))| (k, p)).collect();

    if task.needs_field() && obj.get("field").is_none() {
        ctx.at(None, "/field", format!("task {task} needs a field block"));
    }
    let matrix = match obj.get("matrix") {
        Some(n) => spec.as_ref().and_then(|k| matrix_block(ctx, k, n)),
        None => {
            if task.needs_matrix() {
                ctx.at(None, "/matrix", format!("task {task} needs a matrix"));
            }
            None
        }
    };
    if !task.needs_matrix() {
        if let Some(n) = obj.get("matrix") {
            ctx.node(n, "/matrix", format!("task {task} takes no matrix"));
        }
    }
    let algebra = match obj.get("algebra") {
        Some(n) if task == Task::BchScale => spec.as_ref().and_then(|k| algebra_block(ctx, k, n)),
        Some(n) => {
            ctx.node(n, "/algebra", format!("task {task} takes no algebra"));
            None
        }
        None => {
            if task == Task::BchScale {
                ctx.at(None, "/algebra", "task bch-scale needs an algebra");
            }
            None
        }
    };
    if let (Some(a), Some(m)) = (&algebra, &matrix) {
        if a.dim() != m.rows() {
            let n = obj.get("matrix").unwrap();
            ctx.node(n, "/matrix", format!("matrix is {}x{} but the algebra has dimension {}", m.rows(), m.cols(), a.dim()));
        }
    }

    let d = matrix.as_ref().map(|m| m.rows());
    let mut pr = ParamReader { ctx, params: &params };
    let input = pr.task_input(task, spec.as_ref(), d, ov.precision)?;
    if !ctx.diags.is_empty() {
        return None;
    }
    Some(Problem { task, spec, matrix, algebra, input })
}

fn uint(ctx: &mut Ctx, n: &spanned::Value, field: &str) -> Option<u64> {
    match n.as_number().and_then(|x| x.as_u64()) {
        Some(v) => Some(v),
        None => {
            ctx.node(n, field, "expected a non-negative integer");
            None
        }
    }
}

fn field_block(ctx: &mut Ctx, n: &spanned::Value, precision_override: Option<i32>) -> Option<Arc<FieldSpec>> {
    let Some(obj) = n.as_object() else {
        ctx.node(n, "/field", format!("expected an object, found {}", n.type_str()));
        return None;
    };
    for (k, _) in obj.iter() {
        if !["kind", "p", "modulus", "precision"].contains(&k.get_ref().as_str()) {
            ctx.at(Some(k.start()), &format!("/field/{}", k.get_ref()), "unknown key");
        }
    }
    let kind = match obj.get("kind") {
        Some(k) => match k.as_string() {
            Some("padic") => Some(FieldKind::PAdic),
            Some("laurent") => Some(FieldKind::Laurent),
            _ => {
                ctx.node(k, "/field/kind", "expected \"padic\" or \"laurent\"");
                None
            }
        },
        None => {
            ctx.node(n, "/field/kind", "missing");
            None
        }
    };
    let p_node = obj.get("p");
    let p = match p_node {
        Some(x) => uint(ctx, x, "/field/p"),
        None => {
            ctx.node(n, "/field/p", "missing");
            None
        }
    };
    let file_precision = match obj.get("precision") {
        Some(x) => uint(ctx, x, "/field/precision").map(|v| v.min(i32::MAX as u64) as i32),
        None => None,
    };
    let precision = precision_override.or(file_precision).unwrap_or(DEFAULT_PRECISION);
    let modulus = match obj.get("modulus") {
        Some(m) => match m.as_array() {
            Some(a) => {
                let mut out = Vec::new();
                for c in a {
                    out.push(uint(ctx, c, "/field/modulus")?.min(u32::MAX as u64) as u32);
                }
                Some((m, out))
            }
            None => {
                ctx.node(m, "/field/modulus", "expected an array of coefficients, low degree first");
                None
            }
        },
        None => None,
    };
    let (kind, p) = (kind?, p?);
    if let (FieldKind::PAdic, Some((m, _))) = (kind, &modulus) {
        ctx.node(m, "/field/modulus", "only Laurent fields take a residue modulus");
        return None;
    }
    let p = u32::try_from(p).unwrap_or(u32::MAX);
    let built = match (kind, modulus) {
        (FieldKind::PAdic, _) => FieldSpec::padic(p, precision),
        (FieldKind::Laurent, None) => FieldSpec::laurent(p, precision),
        (FieldKind::Laurent, Some((_, m))) => FieldSpec::laurent_ext(p, m, precision),
    };
    match built {
        Ok(k) => Some(k),
        Err(e) => {
            let msg = e.to_string();
            let (node, field) = if msg.contains("precision") {
                (obj.get("precision").unwrap_or(n), "/field/precision")
            } else if msg.contains("modulus") || msg.contains("residue") {
                (obj.get("modulus").unwrap_or(n), "/field/modulus")
            } else {
                (p_node.unwrap_or(n), "/field/p")
            };
            if precision_override.is_some() && field == "/field/precision" {
                ctx.at(None, "--precision", msg);
            } else {
                ctx.node(node, field, msg);
            }
            None
        }
    }
}

fn element(ctx: &mut Ctx, spec: &Arc<FieldSpec>, n: &spanned::Value, field: &str) -> Option<Element> {
    let text = ctx.scalar_text(n, field)?;
    match parse_element(spec, &text) {
        Ok(e) => Some(e),
        Err(e) => {
            ctx.node(n, field, format!("cannot read '{text}': {e}"));
            None
        }
    }
}

fn matrix_block(ctx: &mut Ctx, spec: &Arc<FieldSpec>, n: &spanned::Value) -> Option<Matrix> {
    let Some(rows) = n.as_array() else {
        ctx.node(n, "/matrix", "expected an array of rows");
        return None;
    };
    if rows.is_empty() {
        ctx.node(n, "/matrix", "matrix has no rows");
        return None;
    }
    if rows.len() > MAX_DIM {
        ctx.node(n, "/matrix", format!("dimension {} exceeds the limit {MAX_DIM}", rows.len()));
        return None;
    }
    let d = rows.len();
    let mut out = Vec::with_capacity(d);
    let mut ok = true;
    for (i, r) in rows.iter().enumerate() {
        let field = format!("/matrix/{i}");
        let Some(entries) = r.as_array() else {
            ctx.node(r, &field, "expected an array of entries");
            ok = false;
            continue;
        };
        if entries.len() != d {
            ctx.node(r, &field, format!("row has {} entries, expected {d} (the matrix must be square)", entries.len()));
            ok = false;
            continue;
        }
        let mut row = Vec::with_capacity(d);
        for (j, e) in entries.iter().enumerate() {
            match element(ctx, spec, e, &format!("/matrix/{i}/{j}")) {
                Some(x) => row.push(x),
                None => ok = false,
            }
        }
        out.push(row);
    }
    if !ok {
        return None;
    }
    Matrix::from_rows(spec, out).ok()
}

fn algebra_block(ctx: &mut Ctx, spec: &Arc<FieldSpec>, n: &spanned::Value) -> Option<NilpotentLieAlgebra> {
    let Some(obj) = n.as_object() else {
        ctx.node(n, "/algebra", "expected an object");
        return None;
    };
    for (k, _) in obj.iter() {
        if !["name", "dim", "brackets"].contains(&k.get_ref().as_str()) {
            ctx.at(Some(k.start()), &format!("/algebra/{}", k.get_ref()), "unknown key");
        }
    }
    let dim = match obj.get("dim") {
        Some(x) => {
            let v = uint(ctx, x, "/algebra/dim")? as usize;
            if v == 0 || v > MAX_DIM {
                ctx.node(x, "/algebra/dim", format!("dimension must lie in 1..={MAX_DIM}"));
                return None;
            }
            Some(v)
        }
        None => None,
    };
    let built = match (obj.get("name"), obj.get("brackets")) {
        (Some(_), Some(b)) => {
            ctx.node(b, "/algebra/brackets", "give either a name or a bracket table, not both");
            return None;
        }
        (Some(name), None) => match name.as_string() {
            Some("heisenberg") => {
                if let (Some(d), Some(x)) = (dim, obj.get("dim")) {
                    if d != 3 {
                        ctx.node(x, "/algebra/dim", "the Heisenberg algebra has dimension 3");
                        return None;
                    }
                }
                NilpotentLieAlgebra::heisenberg(spec)
            }
            Some(fam @ ("abelian" | "filiform")) => {
                let Some(d) = dim else {
                    ctx.node(n, "/algebra/dim", format!("the {fam} family needs a dimension"));
                    return None;
                };
                if fam == "abelian" {
                    NilpotentLieAlgebra::abelian(spec, d)
                } else {
                    NilpotentLieAlgebra::filiform(spec, d)
                }
            }
            _ => {
                ctx.node(name, "/algebra/name", "expected \"heisenberg\", \"abelian\" or \"filiform\"");
                return None;
            }
        },
        (None, brackets) => {
            let Some(d) = dim else {
                ctx.node(n, "/algebra/dim", "missing");
                return None;
            };
            let mut table = vec![vec![vec![Element::zero(spec); d]; d]; d];
            let entries = match brackets {
                None => &[][..],
                Some(b) => match b.as_array() {
                    Some(a) => &a[..],
                    None => {
                        ctx.node(b, "/algebra/brackets", "expected an array");
                        return None;
                    }
                },
            };
            let mut ok = true;
            for (idx, entry) in entries.iter().enumerate() {
                let field = format!("/algebra/brackets/{idx}");
                let Some(o) = entry.as_object() else {
                    ctx.node(entry, &field, "expected {\"i\": .., \"j\": .., \"value\": [..]}");
                    ok = false;
                    continue;
                };
                let get = |k: &str| o.get(k);
                let (Some(i), Some(j), Some(v)) = (get("i"), get("j"), get("value")) else {
                    ctx.node(entry, &field, "needs keys i, j and value");
                    ok = false;
                    continue;
                };
                let (Some(i_v), Some(j_v)) = (uint(ctx, i, &format!("{field}/i")), uint(ctx, j, &format!("{field}/j"))) else {
                    ok = false;
                    continue;
                };
                let (i_v, j_v) = (i_v as usize, j_v as usize);
                if i_v >= d || j_v >= d || i_v == j_v {
                    ctx.node(entry, &field, format!("need distinct indices below {d}"));
                    ok = false;
                    continue;
                }
                let Some(vals) = v.as_array() else {
                    ctx.node(v, &format!("{field}/value"), "expected an array");
                    ok = false;
                    continue;
                };
                if vals.len() != d {
                    ctx.node(v, &format!("{field}/value"), format!("has {} coordinates, expected {d}", vals.len()));
                    ok = false;
                    continue;
                }
                for (k, c) in vals.iter().enumerate() {
                    let Some(x) = element(ctx, spec, c, &format!("{field}/value/{k}")) else {
                        ok = false;
                        continue;
                    };
                    table[i_v][j_v][k] = &table[i_v][j_v][k] + &x;
                    table[j_v][i_v][k] = &table[j_v][i_v][k] - &x;
                }
            }
            if !ok {
                return None;
            }
            NilpotentLieAlgebra::new(spec, d, &table)
        }
    };
    match built {
        Ok(a) => Some(a),
        Err(e) => {
            ctx.node(n, "/algebra", e.to_string());
            None
        }
    }
}

// ---------------------------------------------------------------------------
// task parameters

struct ParamReader<'a, 'b, 'c> {
    ctx: &'a mut Ctx<'c>,
    params: &'b BTreeMap<String, Param>,
}

fn field_of(key: &str, p: &Param) -> String {
    match p.origin {
        Origin::File(_) => format!("/params/{key}"),
        Origin::Flag => format!("--set {key}"),
    }
}

impl ParamReader<'_, '_, '_> {
    fn get(&self, key: &str) -> Option<&Param> {
        self.params.get(key)
    }

    fn fail(&mut self, key: &str, message: impl Into<String>) {
        let p = self.params[key].clone();
        self.ctx.param(&p, None, &field_of(key, &p), message);
    }

    fn int(&mut self, key: &str, default: i64, lo: i64, hi: i64) -> Option<i64> {
        let Some(p) = self.get(key) else {
            return Some(default);
        };
        let v = match &p.value {
            Json::Number(n) => n.as_i64(),
            Json::String(s) => s.trim().parse::<i64>().ok(),
            _ => None,
        };
        match v {
            Some(v) if (lo..=hi).contains(&v) => Some(v),
            Some(v) => {
                self.fail(key, format!("{v} is outside {lo}..={hi}"));
                None
            }
            None => {
                let t = json_type(&p.value);
                self.fail(key, format!("expected an integer, found {t}"));
                None
            }
        }
    }

    fn opt_int(&mut self, key: &str, lo: i64, hi: i64) -> Option<Option<i64>> {
        if self.get(key).is_none() {
            return Some(None);
        }
        self.int(key, 0, lo, hi).map(Some)
    }

    fn rational_value(v: &Json) -> Option<Rational> {
        match v {
            Json::Number(n) => n.as_i64().map(Rational::from_integer),
            Json::String(s) => parse_rational(s).ok(),
            _ => None,
        }
    }

    fn rational(&mut self, key: &str, default: Rational) -> Option<Rational> {
        let Some(p) = self.get(key) else {
            return Some(default);
        };
        match Self::rational_value(&p.value) {
            Some(r) if r.numer().abs() <= 1_000 => Some(r),
            Some(_) => {
                self.fail(key, "radius exponent too large");
                None
            }
            None => {
                self.fail(key, "expected an integer or a string \"a/b\"");
                None
            }
        }
    }

    fn rationals(&mut self, key: &str, default: Vec<Rational>) -> Option<Vec<Rational>> {
        let Some(p) = self.get(key).cloned() else {
            return Some(default);
        };
        let Json::Array(items) = &p.value else {
            self.fail(key, "expected an array");
            return None;
        };
        let mut out = Vec::new();
        for (i, v) in items.iter().enumerate() {
            match Self::rational_value(v) {
                Some(r) if r.numer().abs() <= 1_000 => out.push(r),
                _ => {
                    self.ctx.param(&p, Some(i), &format!("{}/{i}", field_of(key, &p)), "expected an integer or a string \"a/b\"");
                    return None;
                }
            }
        }
        if out.is_empty() {
            self.fail(key, "empty list");
            return None;
        }
        Some(out)
    }

    fn choice<'s>(&mut self, key: &str, default: &'s str, options: &[&'s str]) -> Option<&'s str> {
        let Some(p) = self.get(key) else {
            return Some(default);
        };
        match &p.value {
            Json::String(s) => match options.iter().find(|o| **o == s.as_str()) {
                Some(o) => Some(*o),
                None => {
                    self.fail(key, format!("'{s}' is not one of {}", options.join(", ")));
                    None
                }
            },
            _ => {
                self.fail(key, format!("expected one of {}", options.join(", ")));
                None
            }
        }
    }

    fn required(&mut self, key: &str, task: Task) -> bool {
        if self.get(key).is_none() {
            self.ctx.at(None, &format!("/params/{key}"), format!("task {task} needs parameter '{key}'"));
            return false;
        }
        true
    }

    fn element_value(&mut self, spec: &Arc<FieldSpec>, p: &Param, child: Option<usize>, field: &str, v: &Json) -> Option<Element> {
        let text = match v {
            Json::String(s) => s.clone(),
            Json::Number(n) => n.to_string(),
            other => {
                self.ctx.param(p, child, field, format!("expected an element, found {}", json_type(other)));
                return None;
            }
        };
        match parse_element(spec, &text) {
            Ok(e) => Some(e),
            Err(e) => {
                self.ctx.param(p, child, field, format!("cannot read '{text}': {e}"));
                None
            }
        }
    }

    fn element(&mut self, spec: &Arc<FieldSpec>, key: &str) -> Option<Element> {
        let p = self.get(key)?.clone();
        let field = field_of(key, &p);
        let v = p.value.clone();
        self.element_value(spec, &p, None, &field, &v)
    }

    fn vector_value(&mut self, spec: &Arc<FieldSpec>, p: &Param, child: Option<usize>, field: &str, v: &Json, d: usize) -> Option<Vec<Element>> {
        let Json::Array(items) = v else {
            self.ctx.param(p, child, field, "expected an array of coordinates");
            return None;
        };
        if items.len() != d {
            self.ctx.param(p, child, field, format!("vector has {} coordinates, expected {d}", items.len()));
            return None;
        }
        let mut out = Vec::with_capacity(d);
        for (i, x) in items.iter().enumerate() {
            // coordinates of a plain vector are located precisely
            let c = if child.is_none() { Some(i) } else { child };
            out.push(self.element_value(spec, p, c, &format!("{field}/{i}"), x)?);
        }
        Some(out)
    }

    fn vector(&mut self, spec: &Arc<FieldSpec>, key: &str, d: usize) -> Option<Vec<Element>> {
        let p = self.get(key)?.clone();
        let field = field_of(key, &p);
        let v = p.value.clone();
        self.vector_value(spec, &p, None, &field, &v, d)
    }

    fn vectors(&mut self, spec: &Arc<FieldSpec>, key: &str, d: usize) -> Option<Vec<Vec<Element>>> {
        let Some(p) = self.get(key).cloned() else {
            return Some(Vec::new());
        };
        let field = field_of(key, &p);
        let Json::Array(items) = &p.value else {
            self.fail(key, "expected an array of vectors");
            return None;
        };
        let mut out = Vec::new();
        for (i, v) in items.iter().enumerate() {
            out.push(self.vector_value(spec, &p, Some(i), &format!("{field}/{i}"), v, d)?);
        }
        Some(out)
    }

    fn int_list(&mut self, key: &str) -> Option<Option<Vec<i32>>> {
        let Some(p) = self.get(key).cloned() else {
            return Some(None);
        };
        let Json::Array(items) = &p.value else {
            self.fail(key, "expected an array of integers");
            return None;
        };
        let mut out = Vec::new();
        for (i, v) in items.iter().enumerate() {
            match v.as_i64().and_then(|x| i32::try_from(x).ok()) {
                Some(x) => out.push(x),
                None => {
                    self.ctx.param(&p, Some(i), &format!("{}/{i}", field_of(key, &p)), "expected an integer");
                    return None;
                }
            }
        }
        Some(Some(out))
    }

    fn norm(&mut self) -> Option<NormChoice> {
        match self.choice("norm", "adapted", &["adapted", "max"])? {
            "max" => Some(NormChoice::Max),
            _ => Some(NormChoice::Adapted),
        }
    }

    fn fixture_prime(&mut self, spec: Option<&Arc<FieldSpec>>) -> Option<u32> {
        let p = match self.opt_int("p", 2, 65_535)? {
            Some(p) => p as u32,
            None => match spec {
                Some(k) => k.p(),
                None => {
                    self.ctx.at(None, "/params/p", "fixture needs a prime p (parameter or field block)");
                    return None;
                }
            },
        };
        if let Err(e) = FieldSpec::laurent(p, 8) {
            if self.get("p").is_some() {
                self.fail("p", e.to_string());
            } else {
                self.ctx.at(None, "/field/p", e.to_string());
            }
            return None;
        }
        Some(p)
    }

    fn task_input(&mut self, task: Task, spec: Option<&Arc<FieldSpec>>, d: Option<usize>, precision: Option<i32>) -> Option<TaskInput> {
        let zero = Rational::from_integer(0);
        let samples = |r: &mut Self, default| r.int("samples", default, 1, 10_000).map(|v| v as usize);
        Some(match task {
            Task::Scale => {
                let radii = self.rationals("radii", vec![zero, Rational::from_integer(1), Rational::from_integer(2)])?;
                TaskInput::Scale { radii }
            }
            Task::Decompose => TaskInput::Decompose,
            Task::AdaptedNorm => {
                let samples = samples(self, 32)?;
                let radius = match self.get("radius") {
                    Some(_) => Some(self.rational("radius", zero)?),
                    None => None,
                };
                let vectors = match (spec, d) {
                    (Some(k), Some(d)) => self.vectors(k, "vectors", d)?,
                    _ => Vec::new(),
                };
                TaskInput::AdaptedNorm { vectors, samples, radius }
            }
            Task::Tidy => {
                let radius = self.rational("radius", zero)?;
                let norm = self.norm()?;
                let samples = samples(self, 16)?;
                TaskInput::Tidy { radius, norm, samples }
            }
            Task::Classify | Task::Orbit => {
                let steps = self.int("steps", if task == Task::Orbit { 8 } else { 6 }, 1, 256)? as usize;
                let norm = if task == Task::Orbit { self.norm()? } else { NormChoice::Adapted };
                if !self.required("vector", task) {
                    return None;
                }
                let (Some(k), Some(d)) = (spec, d) else {
                    return None;
                };
                let vector = self.vector(k, "vector", d)?;
                if task == Task::Orbit {
                    TaskInput::Orbit { vector, steps, norm }
                } else {
                    TaskInput::Classify { vector, steps }
                }
            }
            Task::BchScale => {
                let level = self.int("level", 1, 1, 64)? as i32;
                let samples = samples(self, 16)?;
                TaskInput::BchScale { level, samples }
            }
            Task::Fixture => {
                if !self.required("name", task) {
                    return None;
                }
                let name = self.choice("name", "shift", &["shift", "frobenius-twist", "nonanalytic"])?;
                let p = self.fixture_prime(spec)?;
                let default_precision = precision.or(spec.map(|k| k.precision())).unwrap_or(DEFAULT_PRECISION);
                let prec = self.int("precision", default_precision as i64, 4, 1024)? as i32;
                let allowed: &[&str] = match name {
                    "shift" => &["name", "p", "window"],
                    "frobenius-twist" => &["name", "p", "precision", "samples"],
                    _ => &["name", "p", "precision", "exponents", "n_max"],
                };
                let extra: Vec<String> = self.params.keys().filter(|k| !allowed.contains(&k.as_str())).cloned().collect();
                for k in extra {
                    self.fail(&k, format!("not a parameter of the {name} fixture (accepted: {})", allowed.join(", ")));
                }
                match name {
                    "shift" => TaskInput::Fixture(FixtureInput::Shift { p, window: self.int("window", 3, 2, 64)? as usize }),
                    "frobenius-twist" => TaskInput::Fixture(FixtureInput::FrobeniusTwist { p, precision: prec, samples: samples(self, 16)? }),
                    _ => {
                        let exponents = self.int_list("exponents")?;
                        let n_max = match self.get("n_max") {
                            Some(_) => Some(self.int("n_max", 4, 1, 16)? as i32),
                            None => None,
                        };
                        TaskInput::Fixture(FixtureInput::Nonanalytic { p, precision: prec, exponents, n_max })
                    }
                }
            }
            Task::Diffquot => {
                let map_name = self.choice("map", "frobenius-twist", &["identity", "linear", "frobenius-twist", "nonanalytic"])?;
                let jmax = self.int("jmax", 8, 1, 512)? as i32;
                let k = spec?;
                if k.kind() != FieldKind::Laurent && matches!(map_name, "frobenius-twist" | "nonanalytic") {
                    self.fail_or_field("map", format!("the {map_name} map lives on F_q[[X]]; use a Laurent field"));
                    return None;
                }
                let map = match map_name {
                    "identity" => TruncatedSeriesMap::Identity,
                    "linear" => {
                        if !self.required("a", task) {
                            return None;
                        }
                        TruncatedSeriesMap::Linear(self.element(k, "a")?)
                    }
                    "frobenius-twist" => TruncatedSeriesMap::FrobeniusTwist,
                    _ => {
                        let exponents = self.int_list("exponents")?;
                        TruncatedSeriesMap::Nonanalytic {
                            exponents: exponents.unwrap_or_else(|| locdyn_core::fixtures::square_exponents(k.precision())),
                        }
                    }
                };
                let x = match self.get("x") {
                    Some(_) => self.element(k, "x")?,
                    None => Element::zero(k),
                };
                let y = match self.get("y") {
                    Some(_) => self.element(k, "y")?,
                    None => Element::one(k),
                };
                for (name, v) in [("x", &x), ("y", &y)] {
                    if !v.is_integral() {
                        self.fail_or_field(name, format!("{name} must lie in the power series ring (valuation >= 0)"));
                        return None;
                    }
                }
                TaskInput::Diffquot { map, x, y, jmax }
            }
        })
    }

    fn fail_or_field(&mut self, key: &str, message: String) {
        if self.get(key).is_some() {
            self.fail(key, message);
        } else {
            self.ctx.at(None, "/field", message);
        }
    }
}
