use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use extremal_core::constants::ConstantReport;
use extremal_core::explorer::{SweepRow, SweepTable};
use extremal_core::verify::SuiteReport;
use extremal_core::{ExtremalSolution, Interval, PNorm};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Inputs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// `"inf"` or a decimal.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interval: Option<[f64; 2]>,
    pub tol: f64,
    /// Everything else the command was given.
    #[serde(default, skip_serializing_if = "Map::is_empty")]
    pub options: Map<String, Value>,
}

impl Inputs {
    pub fn new(n: Option<usize>, p: Option<PNorm>, interval: Option<&Interval>, tol: f64) -> Self {
        Self {
            n,
            p: p.map(|p| p.to_string()),
            interval: interval.map(|i| [i.a(), i.b()]),
            tol,
            options: Map::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.options.insert(key.to_string(), value.into());
        self
    }
}

/// Timing lives apart from everything else so that two runs with the same
/// flags print identical records outside this block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Metadata {
    pub wall_time_ms: u64,
    /// Milliseconds since the Unix epoch.
    pub timestamp: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ResultRecord {
    pub schema_version: u32,
    pub command: String,
    pub inputs: Inputs,
    pub outputs: Value,
    pub provenance: Value,
    pub metadata: Metadata,
}

impl ResultRecord {
    pub fn new(command: &str, inputs: Inputs, outputs: Value, provenance: Value) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            inputs,
            outputs,
            provenance,
            metadata: Metadata {
                wall_time_ms: 0,
                timestamp: 0,
            },
        }
    }

    /// The cache key: command, degree, exponent, interval and tolerance.
    pub fn key(&self) -> String {
        let i = self
            .inputs
            .interval
            .map(|[a, b]| format!("{a},{b}"))
            .unwrap_or_default();
        format!(
            "{}|{}|{}|{}|{}",
            self.command,
            self.inputs.n.map(|n| n.to_string()).unwrap_or_default(),
            self.inputs.p.as_deref().unwrap_or(""),
            i,
            self.inputs.tol
        )
    }
}

fn solution_provenance(sol: &ExtremalSolution) -> Value {
    json!({
        "method": sol.method,
        "restarts": sol.restarts,
        "converged": sol.converged,
        "stationarityResidual": sol.stationarity_residual,
        "distinctMinima": sol.distinct_minima.iter().map(|v| v.positive_roots().to_vec()).collect::<Vec<_>>(),
    })
}

pub fn constant_record(r: &ConstantReport, tol: f64) -> ResultRecord {
    let bounds: Vec<Value> = r
        .bounds
        .iter()
        .map(|b| {
            json!({
                "name": b.name,
                "side": b.side,
                "bound": b.bound,
                "value": b.value,
                "margin": b.margin,
                "satisfied": b.satisfied,
            })
        })
        .collect();
    let outputs = json!({
        "dStarStar": r.d_star_star,
        "cStar": r.c_star,
        "cCanonical": r.c_canonical,
        "closedForm": r.closed_form.map(|c| json!({"value": c.value, "source": c.source})),
        "bounds": bounds,
        "boundsSatisfied": r.all_bounds_satisfied(),
        "kwongZettl": r.kwong_zettl,
        "roots": r.solution.roots_on_interval,
    });
    ResultRecord::new(
        "constant",
        Inputs::new(Some(r.n), Some(r.p), Some(&r.interval), tol),
        outputs,
        solution_provenance(&r.solution),
    )
}

pub fn extremal_record(sol: &ExtremalSolution, inputs: Inputs) -> ResultRecord {
    let outputs = json!({
        "canonicalPositiveRoots": sol.roots.positive_roots(),
        "canonicalRoots": sol.canonical_polynomial().roots(),
        "roots": sol.roots_on_interval,
        "canonicalNorm": sol.canonical_norm,
        "norm": sol.norm_value,
        "coefficients": sol.polynomial().coefficients(),
    });
    ResultRecord::new("extremal", inputs, outputs, solution_provenance(sol))
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

pub fn row_record(
    command: &str,
    row: &SweepRow,
    interval: &Interval,
    tol: f64,
    extra: &Map<String, Value>,
) -> ResultRecord {
    let mut inputs = Inputs::new(Some(row.n), Some(row.p), Some(interval), tol);
    inputs.options = extra.clone();
    let outputs = json!({
        "roots": row.roots,
        "dStarStar": finite_or_null(row.d_star_star),
        "cStar": finite_or_null(row.c_star),
        "cCanonical": finite_or_null(row.c_canonical),
        "ratio": finite_or_null(row.ratio),
        "suspect": row.suspect,
        "error": row.error,
    });
    let provenance = json!({
        "method": row.method,
        "restarts": row.restarts,
        "converged": row.converged,
    });
    ResultRecord::new(command, inputs, outputs, provenance)
}

/// Rebuild a sweep row from its record; `None` for rows that failed outright.
pub fn row_from_record(rec: &ResultRecord) -> Option<SweepRow> {
    let o = &rec.outputs;
    let pr = &rec.provenance;
    let num = |k: &str| o.get(k)?.as_f64();
    Some(SweepRow {
        n: rec.inputs.n?,
        p: rec.inputs.p.as_deref()?.parse().ok()?,
        roots: serde_json::from_value(o.get("roots")?.clone()).ok()?,
        d_star_star: num("dStarStar")?,
        c_star: num("cStar")?,
        c_canonical: num("cCanonical")?,
        ratio: num("ratio")?,
        method: serde_json::from_value(pr.get("method")?.clone()).ok()?,
        restarts: pr.get("restarts")?.as_u64()? as usize,
        converged: pr.get("converged")?.as_bool()?,
        suspect: o.get("suspect")?.as_bool()?,
        error: o.get("error").and_then(|e| e.as_str().map(str::to_string)),
    })
}

pub fn sweep_summary(command: &str, table: &SweepTable, inputs: Inputs) -> ResultRecord {
    let verdicts: Vec<Value> = table
        .verdicts
        .iter()
        .map(|v| {
            json!({
                "index": v.index,
                "verdict": v.verdict,
                "worstDrop": v.worst_drop,
                "pair": v.pair.map(|(a, b)| [a.to_string(), b.to_string()]),
                "margin": v.margin,
            })
        })
        .collect();
    let outputs = json!({
        "axis": table.axis.iter().map(|&x| if x.is_finite() { x.to_string() } else { "inf".into() }).collect::<Vec<String>>(),
        "ratios": table.rows.iter().map(|r| finite_or_null(r.ratio)).collect::<Vec<_>>(),
        "differences": table.differences,
        "verdicts": verdicts,
        "suspectRows": table.rows.iter().filter(|r| r.suspect).count(),
    });
    let provenance = json!({
        "warmStart": table.metadata.warm_start,
        "forceNumeric": table.metadata.force_numeric,
        "totalRestarts": table.metadata.total_restarts,
    });
    ResultRecord::new(command, inputs, outputs, provenance)
}

pub fn suite_record(rep: &SuiteReport, inputs: Inputs) -> ResultRecord {
    let failures: Vec<Value> = rep
        .failures()
        .map(|c| json!({"name": c.name, "detail": c.detail}))
        .collect();
    let outputs = json!({
        "suite": rep.suite,
        "passed": rep.passed(),
        "checks": rep.checks.len(),
        "failures": failures,
    });
    ResultRecord::new("verify", inputs, outputs, json!({}))
}
