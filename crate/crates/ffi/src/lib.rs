//! C ABI over the rollcall engine.
//!
//! Objects cross the boundary as opaque handles created by `rc_*_load`,
//! `rc_*_ingest` or `rc_model_train` and released with the matching
//! `rc_*_free`. Every fallible call returns an [`RcStatus`]; on failure
//! [`rc_last_error`] describes the problem. Results are written through out
//! pointers, which are left untouched on failure. Panics never unwind into
//! C: they are caught and reported as [`RcStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use rollcall::corpus::{
    build_vocab, load_corpus, parse_corpus, Corpus, CorpusOptions, CorpusPaths, SCHEMA_VERSION,
};
use rollcall::evalharness::{run_in_session_cv, Experiment};
use rollcall::synthgen::{write_synthetic, SynthSpec};
use rollcall::votemodel::{Dataset, ModelConfig, ModelKind, VoteModel, PRESETS};
use rollcall::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Parse = 4,
    InvalidArgument = 5,
    NotFound = 6,
    Numeric = 7,
    CheckFailed = 8,
    Panic = 9,
}

/// Processed corpus handle.
pub struct RcCorpus {
    inner: Corpus,
}

/// Trained or loaded vote model handle.
pub struct RcModel {
    inner: VoteModel,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(RcStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Io { .. } => RcStatus::Io,
            Error::Parse { .. } | Error::Json(_) => RcStatus::Parse,
            Error::DuplicateId { .. }
            | Error::DanglingReference { .. }
            | Error::Config(_)
            | Error::Empty(_) => RcStatus::InvalidArgument,
            Error::OutOfRange { .. } => RcStatus::NotFound,
            Error::Shape { .. } | Error::NonFinite(_) | Error::NonFiniteLoss { .. } => {
                RcStatus::Numeric
            }
            Error::Check(_) => RcStatus::CheckFailed,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(RcStatus::NullPointer, format!("`{what}` is null"))
}

/// Runs `body`, converting errors and panics into a status code.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> RcStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => RcStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("internal panic: {msg}"));
            RcStatus::Panic
        }
    }
}

unsafe fn text<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if ptr.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        Failure(
            RcStatus::InvalidUtf8,
            format!("`{what}` is not valid UTF-8"),
        )
    })
}

unsafe fn path(ptr: *const c_char, what: &str) -> Result<PathBuf, Failure> {
    text(ptr, what).map(PathBuf::from)
}

unsafe fn handle<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, Failure> {
    ptr.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the most recent failure on this thread, or NULL if none.
/// The pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn rc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Parses the three JSONL files and applies the standard preprocessing.
///
/// # Safety
/// Path arguments must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rc_corpus_ingest(
    bills: *const c_char,
    legislators: *const c_char,
    votes: *const c_char,
    out: *mut *mut RcCorpus,
) -> RcStatus {
    guard(|| {
        let paths = CorpusPaths {
            bills: path(bills, "bills")?,
            legislators: path(legislators, "legislators")?,
            votes: path(votes, "votes")?,
        };
        if out.is_null() {
            return Err(null("out"));
        }
        let corpus = Corpus::build(
            parse_corpus(&paths, SCHEMA_VERSION)?,
            &CorpusOptions::default(),
        )?;
        write_out(
            out,
            Box::into_raw(Box::new(RcCorpus { inner: corpus })),
            "out",
        )
    })
}

/// Loads a corpus cache written by `rollcall ingest`.
///
/// # Safety
/// `cache` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rc_corpus_load(cache: *const c_char, out: *mut *mut RcCorpus) -> RcStatus {
    guard(|| {
        let p = path(cache, "cache")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let corpus = load_corpus(&p)?;
        write_out(
            out,
            Box::into_raw(Box::new(RcCorpus { inner: corpus })),
            "out",
        )
    })
}

/// Bill, vote and legislator counts. Any out pointer may be NULL.
///
/// # Safety
/// `corpus` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn rc_corpus_counts(
    corpus: *const RcCorpus,
    bills: *mut usize,
    votes: *mut usize,
    legislators: *mut usize,
) -> RcStatus {
    guard(|| {
        let c = &handle(corpus, "corpus")?.inner;
        for (out, value) in [
            (bills, c.bills.len()),
            (votes, c.votes.len()),
            (legislators, c.num_legislators()),
        ] {
            if !out.is_null() {
                out.write(value);
            }
        }
        Ok(())
    })
}

/// Share of yes votes after filtering.
///
/// # Safety
/// `corpus` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rc_corpus_yes_rate(corpus: *const RcCorpus, out: *mut f64) -> RcStatus {
    guard(|| write_out(out, handle(corpus, "corpus")?.inner.yes_rate(), "out"))
}

/// Releases a corpus. NULL is ignored.
///
/// # Safety
/// `corpus` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rc_corpus_free(corpus: *mut RcCorpus) {
    if !corpus.is_null() {
        drop(Box::from_raw(corpus));
    }
}

unsafe fn model_config(spec: *const c_char) -> Result<ModelConfig, Failure> {
    let spec = text(spec, "model_config")?;
    if !PRESETS.contains(&spec) && !std::path::Path::new(spec).exists() {
        return Err(Failure(
            RcStatus::InvalidArgument,
            format!(
                "`{spec}` is neither a preset ({}) nor a config file",
                PRESETS.join(", ")
            ),
        ));
    }
    Ok(ModelConfig::resolve(spec)?)
}

/// Trains a neural model on every vote in `corpus`. `model_config` is a
/// preset name (`"cnn_meta"`) or a path to a JSON config.
///
/// # Safety
/// `corpus` must be a live handle, `model_config` a NUL-terminated string
/// and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rc_model_train(
    corpus: *const RcCorpus,
    model_config: *const c_char,
    out: *mut *mut RcModel,
) -> RcStatus {
    guard(|| {
        let c = &handle(corpus, "corpus")?.inner;
        let cfg = self::model_config(model_config)?;
        if cfg.kind != ModelKind::Neural {
            return Err(Failure(
                RcStatus::InvalidArgument,
                format!("`{}` is not a neural model", cfg.name),
            ));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let vocab = build_vocab(c.bills.values());
        let data = Dataset::from_votes(c, &vocab, &c.votes)?;
        let mut model = VoteModel::for_corpus(cfg, vocab, c)?;
        model.train(&data)?;
        write_out(
            out,
            Box::into_raw(Box::new(RcModel { inner: model })),
            "out",
        )
    })
}

/// Loads a checkpoint written by `rollcall train` or [`rc_model_save`].
///
/// # Safety
/// `checkpoint` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rc_model_load(
    checkpoint: *const c_char,
    out: *mut *mut RcModel,
) -> RcStatus {
    guard(|| {
        let p = path(checkpoint, "checkpoint")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let model = VoteModel::load(&p)?;
        write_out(
            out,
            Box::into_raw(Box::new(RcModel { inner: model })),
            "out",
        )
    })
}

/// # Safety
/// `model` must be a live handle and `checkpoint` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn rc_model_save(
    model: *const RcModel,
    checkpoint: *const c_char,
) -> RcStatus {
    guard(|| {
        Ok(handle(model, "model")?
            .inner
            .save(&path(checkpoint, "checkpoint")?)?)
    })
}

/// Probability that `legislator_id` votes yes on `bill_id`, a bill of
/// `corpus`. The legislator must be known to the model.
///
/// # Safety
/// Handles must be live, ids NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rc_model_predict(
    model: *const RcModel,
    corpus: *const RcCorpus,
    bill_id: *const c_char,
    legislator_id: *const c_char,
    out: *mut f64,
) -> RcStatus {
    guard(|| {
        let m = &handle(model, "model")?.inner;
        let c = &handle(corpus, "corpus")?.inner;
        let bill_id = text(bill_id, "bill_id")?;
        let legislator_id = text(legislator_id, "legislator_id")?;
        let bill = c
            .bills
            .get(bill_id)
            .ok_or_else(|| Failure(RcStatus::NotFound, format!("unknown bill `{bill_id}`")))?;
        let row = m
            .legislators()
            .iter()
            .position(|l| l == legislator_id)
            .ok_or_else(|| {
                Failure(
                    RcStatus::NotFound,
                    format!("legislator `{legislator_id}` unknown to the model"),
                )
            })?;
        let p = m.predict(&m.vocab().index_bill(bill), row)?;
        write_out(out, p, "out")
    })
}

/// # Safety
/// `model` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rc_model_free(model: *mut RcModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Pooled k-fold cross-validation accuracy of `model_config` on `corpus`.
///
/// # Safety
/// `corpus` must be live, `model_config` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rc_eval_in_session(
    corpus: *const RcCorpus,
    model_config: *const c_char,
    folds: usize,
    fold_seed: u64,
    out: *mut f64,
) -> RcStatus {
    guard(|| {
        let c = &handle(corpus, "corpus")?.inner;
        let cfg = self::model_config(model_config)?;
        let experiment = Experiment {
            folds,
            fold_seed,
            ..Experiment::default()
        };
        let result = run_in_session_cv(c, &cfg, &experiment)?;
        write_out(out, result.accuracy, "out")
    })
}

/// Writes a synthetic corpus for `spec_json` (a JSON object, may be `{}`)
/// into directory `dir`.
///
/// # Safety
/// Both arguments must be NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn rc_synth_write(spec_json: *const c_char, dir: *const c_char) -> RcStatus {
    guard(|| {
        let spec: SynthSpec =
            serde_json::from_str(text(spec_json, "spec_json")?).map_err(Error::from)?;
        write_synthetic(&spec, &path(dir, "dir")?)?;
        Ok(())
    })
}
