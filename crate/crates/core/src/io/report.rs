use crate::experiment::PipelineReport;

pub const REPORT_HEADER: [&str; 7] = [
    "corpus_id",
    "pipeline",
    "step",
    "states",
    "transitions",
    "ms",
    "error",
];

/// Renders one CSV row per `(automaton, pipeline)` report.
///
/// `step` holds the per-step trace as `name:states:transitions:ms` entries
/// joined by `;`. `states`/`transitions` are the final counts and `ms` the
/// total time. `error` is empty for successful runs.
pub fn write_report_csv(rows: &[PipelineReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(REPORT_HEADER).expect("writing to memory");
    for r in rows {
        let trace = r
            .steps
            .iter()
            .map(|s| format!("{}:{}:{}:{:.3}", s.name, s.states, s.transitions, s.ms))
            .collect::<Vec<_>>()
            .join(";");
        w.write_record([
            r.corpus_id.clone(),
            r.pipeline.clone(),
            trace,
            r.states.to_string(),
            r.transitions.to_string(),
            format!("{:.3}", r.ms),
            r.error.clone().unwrap_or_default(),
        ])
        .expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv output is utf-8")
}
