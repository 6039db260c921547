use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;
use squeeze_core::gfmat::is_prime;
use squeeze_core::gradedlc::{cech_cohomology, local_cohomology, GradedModuleRecord};
use squeeze_core::squeeze::{
    classical_tate_dimensions, left_squeezed_resolution, norm_map, right_squeezed_resolution,
    squeezed_homology, tate_lengths, tate_splice, LeftSqueezedTrace, LeftTraceRecord,
    RightSqueezedTrace, RightTraceRecord,
};
use squeeze_core::{
    BettiTable, GradedBettiTable, GradedModule, Group, GroupAlgebra, GroupSpec, Window,
};

use crate::cache::{cache_key, code_version, Cache};
use crate::failure::Failure;

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::parse(format!("cannot read {what} {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::parse(format!("malformed {what} {}: {e}", path.display())))
}

pub fn close_group(spec: &GroupSpec) -> Result<Arc<Group>, Failure> {
    spec.close()
        .map(Arc::new)
        .map_err(|e| Failure::parse(format!("group {}: {e}", spec.name)))
}

/// One group at one prime, with a lazily built group algebra and cached traces.
pub struct Session {
    pub spec: GroupSpec,
    pub group: Arc<Group>,
    pub p: u32,
    pub seed: u64,
    cache: Cache,
    alg: Option<GroupAlgebra>,
}

impl Session {
    pub fn new(spec: GroupSpec, p: u32, seed: u64, cache: Cache) -> Result<Self, Failure> {
        if !is_prime(p) {
            return Err(Failure::parse(format!("--prime {p} is not prime")));
        }
        let group = close_group(&spec)?;
        Ok(Session {
            spec,
            group,
            p,
            seed,
            cache,
            alg: None,
        })
    }

    pub fn from_file(path: &Path, p: u32, seed: u64, cache: Cache) -> Result<Self, Failure> {
        let spec: GroupSpec = read_json(path, "group file")?;
        let s = Session::new(spec, p, seed, cache)?;
        if s.group.order() % p as usize != 0 {
            eprintln!(
                "warning: {p} does not divide |{}| = {}; computing anyway",
                s.spec.name,
                s.group.order()
            );
        }
        Ok(s)
    }

    pub fn algebra(&mut self) -> Result<&GroupAlgebra, Failure> {
        if self.alg.is_none() {
            self.alg = Some(GroupAlgebra::new(self.group.clone(), self.p, self.seed)?);
        }
        Ok(self.alg.as_ref().expect("just built"))
    }

    fn key(&self, module: &str, steps: usize) -> String {
        cache_key(&self.spec, self.p, module, steps, self.seed)
    }

    /// Left squeezed resolution of `k` of the given length, via the cache.
    pub fn left_trace(&mut self, length: usize) -> Result<LeftSqueezedTrace, Failure> {
        let key = self.key("trivial/left", length);
        if let Some(rec) = self.cache.load::<LeftTraceRecord>(&key) {
            if let Ok(trace) = rec.validate(self.group.clone()) {
                return Ok(trace);
            }
        }
        let alg = self.algebra()?;
        let trace = left_squeezed_resolution(alg, &alg.trivial(), length)?;
        self.cache.store(&key, &trace.to_record(&self.group));
        Ok(trace)
    }

    /// Right squeezed resolution of `k` of the given depth, via the cache.
    pub fn right_trace(&mut self, length: usize) -> Result<RightSqueezedTrace, Failure> {
        let key = self.key("trivial/right", length);
        if let Some(rec) = self.cache.load::<RightTraceRecord>(&key) {
            if let Ok(trace) = rec.validate(self.group.clone()) {
                return Ok(trace);
            }
        }
        let alg = self.algebra()?;
        let trace = right_squeezed_resolution(alg, &alg.trivial(), length)?;
        self.cache.store(&key, &trace.to_record(&self.group));
        Ok(trace)
    }

    pub fn loops(&mut self, window: Window) -> Result<BettiTable, Failure> {
        let trace = self.left_trace((window.hi + 1).max(0) as usize)?;
        Ok(squeezed_homology(&trace, window)?)
    }

    pub fn tate(&mut self, window: Window) -> Result<BettiTable, Failure> {
        let (l, r) = tate_lengths(window);
        let left = self.left_trace(l)?;
        let right = self.right_trace(r)?;
        let splice = tate_splice(&left, &right)?;
        let bad = splice.complex.d_squared_failures();
        if !bad.is_empty() {
            return Err(Failure::failed(format!("d^2 != 0 at degrees {bad:?}")));
        }
        Ok(splice.complex.homology(window)?)
    }

    pub fn classical(&mut self, window: Window) -> Result<BettiTable, Failure> {
        Ok(classical_tate_dimensions(self.algebra()?, window)?)
    }

    fn meta(&self, command: &str, window: Option<Window>) -> Vec<(&'static str, String)> {
        let mut m = vec![
            ("command", command.to_string()),
            ("group", self.spec.name.clone()),
            ("order", self.group.order().to_string()),
            ("p", self.p.to_string()),
            ("seed", self.seed.to_string()),
        ];
        if let Some(w) = window {
            m.push(("window", w.to_string()));
        }
        m.push(("version", code_version()));
        m
    }
}

#[derive(Serialize)]
struct Row {
    degree: i64,
    dim: usize,
}

#[derive(Serialize)]
struct TableJson<'a> {
    command: &'a str,
    group: &'a str,
    order: usize,
    p: u32,
    seed: u64,
    window: String,
    version: String,
    rows: Vec<Row>,
}

pub fn render_table(s: &Session, command: &str, table: &BettiTable, json: bool) -> String {
    if !json {
        return table.to_tsv(&s.meta(command, Some(table.window)));
    }
    let out = TableJson {
        command,
        group: &s.spec.name,
        order: s.group.order(),
        p: s.p,
        seed: s.seed,
        window: table.window.to_string(),
        version: code_version(),
        rows: table
            .iter()
            .map(|(degree, dim)| Row { degree, dim })
            .collect(),
    };
    serde_json::to_string_pretty(&out).expect("serializable") + "\n"
}

#[derive(Serialize)]
struct NormJson<'a> {
    command: &'a str,
    group: &'a str,
    order: usize,
    p: u32,
    seed: u64,
    version: String,
    verdict: String,
    p_nilpotent: bool,
    rank: usize,
    matrix: Vec<Vec<u32>>,
}

pub fn norm(s: &mut Session, json: bool) -> Result<String, Failure> {
    let n = norm_map(s.algebra()?)?;
    let nilpotence = if n.p_nilpotent {
        "p-nilpotent"
    } else {
        "not p-nilpotent"
    };
    if json {
        let out = NormJson {
            command: "norm",
            group: &s.spec.name,
            order: s.group.order(),
            p: s.p,
            seed: s.seed,
            version: code_version(),
            verdict: n.verdict.to_string(),
            p_nilpotent: n.p_nilpotent,
            rank: n.rank,
            matrix: n.matrix.to_nested(),
        };
        return Ok(serde_json::to_string_pretty(&out).expect("serializable") + "\n");
    }
    let fields: Vec<String> = s
        .meta("norm", None)
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    let mut out = format!("# {}\n", fields.join(" "));
    out.push_str(&format!("verdict\t{} ({nilpotence})\n", n.verdict));
    out.push_str(&format!("rank\t{}\n", n.rank));
    out.push_str(&format!(
        "matrix\t{}x{}\n",
        n.matrix.rows(),
        n.matrix.cols()
    ));
    for r in 0..n.matrix.rows() {
        let row: Vec<String> = n.matrix.row(r).iter().map(u32::to_string).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    Ok(out)
}

pub fn load_module(path: &Path) -> Result<(String, GradedModule), Failure> {
    let rec: GradedModuleRecord = read_json(path, "module file")?;
    let name = rec.name.clone().unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    });
    let m = GradedModule::from_record(&rec)
        .map_err(|e| Failure::parse(format!("module file {}: {e}", path.display())))?;
    Ok((name, m))
}

#[derive(Serialize)]
struct GradedRow {
    index: usize,
    degree: i64,
    dim: usize,
}

#[derive(Serialize)]
struct GradedJson<'a> {
    command: &'a str,
    module: &'a str,
    p: u32,
    window: String,
    version: String,
    rows: Vec<GradedRow>,
}

pub fn localcoh(path: &Path, window: Window, cech: bool, json: bool) -> Result<String, Failure> {
    let (name, m) = load_module(path)?;
    let (command, table): (&str, GradedBettiTable) = if cech {
        ("localcoh-cech", cech_cohomology(&m, window)?)
    } else {
        ("localcoh", local_cohomology(&m, window)?)
    };
    if json {
        let rows = (0..=table.max_index)
            .flat_map(|j| window.degrees().map(move |d| (j, d)))
            .map(|(index, degree)| GradedRow {
                index,
                degree,
                dim: table.get(index, degree),
            })
            .collect();
        let out = GradedJson {
            command,
            module: &name,
            p: m.p(),
            window: window.to_string(),
            version: code_version(),
            rows,
        };
        return Ok(serde_json::to_string_pretty(&out).expect("serializable") + "\n");
    }
    let meta = [
        ("command", command.to_string()),
        ("module", name.replace(char::is_whitespace, "_")),
        ("p", m.p().to_string()),
        ("window", window.to_string()),
        ("version", code_version()),
    ];
    Ok(table.to_tsv(&meta))
}
