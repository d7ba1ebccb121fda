use super::config::ModelConfig;
use super::model::{Dataset, Example, VoteModel};
use crate::corpus::{Bill, Vocab};
use crate::ndcore::{grad_check, GradCheckOptions, GradCheckReport, Grads};
use crate::Result;

/// Vocabulary size of the gradient-check micro-instance.
pub const MICRO_VOCAB: usize = 20;

/// Three legislators, three votes on three bills, twenty vocabulary
/// entries. One bill is shorter than any CNN window so padding is
/// exercised; sponsor fractions are mixed so both party copies matter.
pub fn micro_instance(config: &ModelConfig) -> Result<(VoteModel, Dataset)> {
    let vocab = Vocab::from_tokens((0..MICRO_VOCAB - 2).map(|i| format!("w{i:02}")));
    let bill = |id: &str, summary: &[u32], full: &[u32], p_r: f64, p_d: f64| Bill {
        bill_id: id.into(),
        session: "micro".into(),
        summary_tokens: summary.to_vec(),
        fulltext_tokens: Some(full.to_vec()),
        p_r,
        p_d,
    };
    let bills = vec![
        bill(
            "b0",
            &[2, 7, 11, 3, 19, 5],
            &[2, 7, 11, 3, 19, 5, 8, 8, 13],
            0.6,
            0.4,
        ),
        bill("b1", &[4, 1], &[4, 1, 9, 17, 6], 0.3, 0.5),
        bill(
            "b2",
            &[12, 15, 10, 18, 14],
            &[16, 12, 15, 10, 18, 14, 2],
            1.0,
            0.0,
        ),
    ];
    let examples = vec![
        Example {
            bill: 0,
            legislator: 0,
            label: true,
        },
        Example {
            bill: 1,
            legislator: 1,
            label: false,
        },
        Example {
            bill: 2,
            legislator: 2,
            label: true,
        },
    ];
    let model = VoteModel::init(
        config.clone(),
        vocab,
        vec!["L0".into(), "L1".into(), "L2".into()],
    )?;
    Ok((model, Dataset { bills, examples }))
}

/// Compares the analytic gradient of the mean loss over all of `data`
/// with central differences. `tamper` may alter the analytic gradient
/// before comparison (a negative control).
pub fn check_gradients(
    model: &VoteModel,
    data: &Dataset,
    opts: &GradCheckOptions,
    tamper: impl FnOnce(&mut Grads),
) -> Result<GradCheckReport> {
    let batch: Vec<usize> = (0..data.len()).collect();
    let mut grads = Grads::zeros_like(model.params());
    model.batch_gradients(model.params(), data, &batch, &mut grads)?;
    tamper(&mut grads);
    // The closure cannot report errors; a failing forward pass shows up as
    // a NaN loss and therefore as a failed coordinate.
    let loss =
        |p: &crate::ndcore::ParamStore| model.batch_loss(p, data, &batch).unwrap_or(f64::NAN);
    grad_check(loss, model.params(), &grads, opts)
}
