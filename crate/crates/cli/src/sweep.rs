//! Synthetic sweeps: random DAGs, several summarizers per instance, one CSV
//! row per (instance, method).

use std::io::Write;
use std::time::Instant;

use cagres_core::bench::{brute_force_summarize, gen_random_dag, random_summarize, GenSpec};
use cagres_core::{summarize, CagresConfig, SummaryDag};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Cagres,
    CagresNoCache,
    CagresNoPreprocess,
    Random,
    BruteForce,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Cagres,
        Method::CagresNoCache,
        Method::CagresNoPreprocess,
        Method::Random,
        Method::BruteForce,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Cagres => "cagres",
            Method::CagresNoCache => "cagres-no-cache",
            Method::CagresNoPreprocess => "cagres-no-preprocess",
            Method::Random => "random",
            Method::BruteForce => "bruteforce",
        }
    }

    pub fn parse(name: &str) -> Option<Method> {
        Method::ALL.into_iter().find(|m| m.name() == name)
    }

    pub fn run(self, g: &cagres_core::Dag, k: usize, seed: u64) -> cagres_core::Result<SummaryDag> {
        let cfg = CagresConfig::new(k, seed);
        match self {
            Method::Cagres => summarize(g, &cfg),
            Method::CagresNoCache => summarize(
                g,
                &CagresConfig {
                    use_cache: false,
                    ..cfg
                },
            ),
            Method::CagresNoPreprocess => summarize(
                g,
                &CagresConfig {
                    use_preprocessing: false,
                    ..cfg
                },
            ),
            Method::Random => random_summarize(g, k, seed),
            Method::BruteForce => brute_force_summarize(g, k),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub ns: Vec<usize>,
    pub densities: Vec<f64>,
    pub seeds: Vec<u64>,
    /// Target cluster count; `None` means `ceil(n / 2)`.
    pub k: Option<usize>,
    pub methods: Vec<Method>,
    pub timing: bool,
    pub parallel: bool,
}

impl SweepSpec {
    pub fn instances(&self) -> Vec<Instance> {
        let mut out = Vec::new();
        for &n in &self.ns {
            for &density in &self.densities {
                for &seed in &self.seeds {
                    out.push(Instance {
                        id: out.len(),
                        spec: GenSpec { n, density, seed },
                        k: self.k.unwrap_or(n.div_ceil(2)).clamp(1, n),
                    });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Instance {
    pub id: usize,
    pub spec: GenSpec,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub instance_id: usize,
    pub method: &'static str,
    pub n: usize,
    pub density: f64,
    pub k: usize,
    pub seed: u64,
    pub clusters: usize,
    pub additional_edges: usize,
    /// Empty when timing is off, so reports stay reproducible.
    pub runtime_ms: Option<f64>,
}

fn run_instance(inst: &Instance, spec: &SweepSpec) -> cagres_core::Result<Vec<ReportRow>> {
    let g = gen_random_dag(&inst.spec)?;
    spec.methods
        .iter()
        .map(|&m| {
            let start = Instant::now();
            let h = m.run(&g, inst.k, inst.spec.seed)?;
            let elapsed = start.elapsed().as_secs_f64() * 1e3;
            Ok(ReportRow {
                instance_id: inst.id,
                method: m.name(),
                n: inst.spec.n,
                density: inst.spec.density,
                k: inst.k,
                seed: inst.spec.seed,
                clusters: h.cluster_count(),
                additional_edges: h.additional_edges(),
                runtime_ms: spec.timing.then_some(elapsed),
            })
        })
        .collect()
}

/// Rows come back ordered by instance, then by method as listed, whether or
/// not the instances ran in parallel.
pub fn run_sweep(spec: &SweepSpec) -> cagres_core::Result<Vec<ReportRow>> {
    let instances = spec.instances();
    let per_instance: Vec<Vec<ReportRow>> = if spec.parallel {
        instances
            .par_iter()
            .map(|i| run_instance(i, spec))
            .collect::<cagres_core::Result<_>>()?
    } else {
        instances
            .iter()
            .map(|i| run_instance(i, spec))
            .collect::<cagres_core::Result<_>>()?
    };
    Ok(per_instance.into_iter().flatten().collect())
}

pub fn write_report<W: Write>(rows: &[ReportRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record([
            "instance_id",
            "method",
            "n",
            "density",
            "k",
            "seed",
            "clusters",
            "additional_edges",
            "runtime_ms",
        ])?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(parallel: bool) -> SweepSpec {
        SweepSpec {
            ns: vec![6, 8],
            densities: vec![0.3],
            seeds: vec![1, 2],
            k: None,
            methods: vec![Method::Cagres, Method::BruteForce],
            timing: false,
            parallel,
        }
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let a = run_sweep(&spec(true)).unwrap();
        let b = run_sweep(&spec(false)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 8);
        assert_eq!(a[0].k, 3);
        assert!(a
            .chunks(2)
            .all(|p| p[1].additional_edges <= p[0].additional_edges));
    }

    #[test]
    fn report_layout() {
        let rows = run_sweep(&spec(false)).unwrap();
        let mut buf = Vec::new();
        write_report(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next(),
            Some("instance_id,method,n,density,k,seed,clusters,additional_edges,runtime_ms")
        );
        assert!(lines.next().unwrap().starts_with("0,cagres,6,0.3,3,1,3,"));
        assert_eq!(text.lines().count(), 9);
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(Method::parse(m.name()), Some(m));
        }
        assert_eq!(Method::parse("nope"), None);
    }
}
