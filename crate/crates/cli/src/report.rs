use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Indeterminate,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Indeterminate => "indeterminate",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaskReport {
    pub task: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_exprs: Option<BTreeMap<String, String>>,
    pub seed: u64,
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl TaskReport {
    pub fn new(task: impl Into<String>, seed: u64) -> TaskReport {
        TaskReport {
            task: task.into(),
            status: Status::Pass,
            class: None,
            kind: None,
            degree: None,
            residual: None,
            witness: None,
            output_exprs: None,
            seed,
            mode: "exact".into(),
            error: None,
        }
    }

    pub fn output(&mut self, key: impl Into<String>, value: impl fmt::Display) {
        self.output_exprs.get_or_insert_with(BTreeMap::new).insert(key.into(), value.to_string());
    }

    /// Demotes a passing report; never promotes.
    pub fn require(&mut self, ok: bool) {
        if !ok {
            self.status = Status::Fail;
        }
    }
}

impl fmt::Display for TaskReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {} ({})", self.status, self.task, self.mode)?;
        if let Some(k) = &self.kind {
            write!(f, " kind={k}")?;
        }
        if let Some(c) = self.class {
            write!(f, " class={c}")?;
        }
        if let Some(d) = &self.degree {
            write!(f, " degree={d}")?;
        }
        if let Some(r) = self.residual {
            write!(f, " residual={r:.3e}")?;
        }
        if let Some(w) = &self.witness {
            write!(f, " witness={w:?}")?;
        }
        if let Some(e) = &self.error {
            write!(f, " error: {e}")?;
        }
        if let Some(out) = &self.output_exprs {
            for (k, v) in out {
                write!(f, "\n    {k} = {v}")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub seed: u64,
    pub samples: usize,
    pub tol: f64,
    pub results: Vec<TaskReport>,
}

impl RunReport {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.status == Status::Pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
