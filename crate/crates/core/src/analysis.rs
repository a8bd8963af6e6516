//! Report-producing analysis driver: admissibility sweep, curvature grid,
//! optional flatness classification, all bundled into one serializable
//! report.

use crate::curvature::{self, SampleOutcome};
use crate::error::Result;
use crate::flatness::{self, FlatClassification};
use crate::surface::{self, AdmissibilityReport, SpecEcho, SurfaceSpec};
use serde::{Deserialize, Serialize};

/// What to run and how finely to sample.
#[derive(Debug, Clone)]
pub struct AnalysisOptions {
    pub grid: (usize, usize),
    /// Overrides the tolerance declared in the spec when set.
    pub tolerance: Option<f64>,
    pub classify: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            grid: (surface::DEFAULT_GRID, surface::DEFAULT_GRID),
            tolerance: None,
            classify: false,
        }
    }
}

/// Tolerances a report was produced with.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Tolerances {
    pub admissibility: f64,
    pub classification: f64,
}

/// The complete analysis result. Every number in it is finite: per-point
/// failures are explicit entries, and non-finite sample values are folded
/// into failures before the report is assembled.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub tool_version: String,
    pub timestamp: String,
    pub tolerances: Tolerances,
    pub grid: (usize, usize),
    pub spec_echo: SpecEcho,
    pub admissibility: AdmissibilityReport,
    pub samples: Vec<SampleOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<FlatClassification>,
    /// Set when classification was requested but aborted with an error.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification_error: Option<String>,
}

impl AnalysisReport {
    /// True when the report carries a Flat verdict.
    pub fn is_flat(&self) -> bool {
        matches!(
            self.classification,
            Some(FlatClassification {
                verdict: flatness::Verdict::Flat,
                ..
            })
        )
    }
}

fn sample_is_finite(sample: &curvature::CurvatureSample) -> bool {
    [
        sample.t1,
        sample.t2,
        sample.ma_residual,
        sample.rho11,
        sample.s,
        sample.s1,
        sample.theta2_21,
        sample.theta2_10,
    ]
    .iter()
    .all(|x| x.is_finite())
}

/// Run the full analysis pipeline on a loaded spec.
pub fn analyze(spec: &SurfaceSpec, options: &AnalysisOptions) -> Result<AnalysisReport> {
    let tol = options.tolerance.unwrap_or(spec.tolerance);
    let (n1, n2) = options.grid;

    let admissibility = surface::admissibility(spec, n1, n2, tol)?;
    let samples: Vec<SampleOutcome> = curvature::sample_grid(spec, n1, n2, tol)?
        .into_iter()
        .map(|outcome| match outcome {
            SampleOutcome::Sample(sample) if !sample_is_finite(&sample) => {
                SampleOutcome::Failed {
                    t1: sample.t1,
                    t2: sample.t2,
                    error: "non-finite invariant value".into(),
                }
            }
            other => other,
        })
        .collect();

    let classification_tol = tol.max(1e-9) * 10.0;
    let (classification, classification_error) = if options.classify {
        match flatness::classify(spec, classification_tol) {
            Ok(result) => (Some(result), None),
            Err(e) => (None, Some(e.to_string())),
        }
    } else {
        (None, None)
    };

    Ok(AnalysisReport {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: String::new(),
        tolerances: Tolerances {
            admissibility: tol,
            classification: classification_tol,
        },
        grid: (n1, n2),
        spec_echo: spec.echo(),
        admissibility,
        samples,
        classification,
        classification_error,
    })
}

/// Render the sample grid as CSV. Failed points are omitted; they remain
/// visible in the JSON report.
pub fn samples_to_csv(samples: &[SampleOutcome]) -> String {
    let mut out = String::from("t1,t2,ma_residual,rho11,S,S1,theta2_21,theta2_10,flat_here\n");
    for outcome in samples {
        if let SampleOutcome::Sample(s) = outcome {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                s.t1,
                s.t2,
                s.ma_residual,
                s.rho11,
                s.s,
                s.s1,
                s.theta2_21,
                s.theta2_10,
                s.flat_here
            ));
        }
    }
    out
}
