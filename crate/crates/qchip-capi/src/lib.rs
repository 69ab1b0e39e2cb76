//! C ABI for the placement engine. Handles are opaque pointers owned by the
//! caller and released with the matching `_free`. Every entry point returns a
//! status code; the message behind a non-zero status is fetched with
//! `qchip_last_error_message`. No function unwinds across the boundary.

use qchip::config::EngineConfig;
use qchip::files::{placement_from_layout, save_placement, Stage};
use qchip::gp::synthetic_gp;
use qchip::layout::Layout;
use qchip::metrics::{metrics_report, report_json};
use qchip::pipeline::{run_pipeline, Engine};
use qchip::topo::{gen_topology, substrate_cells, TopologySpec};
use qchip::validate::validate;
use qchip::Error;
use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

/// Status codes returned by every API call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QchipStatus {
    Ok = 0,
    /// Malformed argument or input file.
    InvalidInput = 2,
    /// Substrate cannot hold the components under the requested constraints.
    Capacity = 3,
    /// Internal invariant breach; report it.
    Internal = 4,
    /// A required pointer argument was null.
    NullPointer = 5,
    /// A string argument was not valid UTF-8.
    Utf8 = 6,
    /// The output buffer is too small; `*needed` holds the required size.
    BufferTooSmall = 7,
}

/// A placed or in-progress chip layout. Opaque.
pub struct QchipLayout {
    inner: Layout,
    cfg: EngineConfig,
    seed: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(err: &Error) -> QchipStatus {
    match err.exit_code() {
        2 => QchipStatus::InvalidInput,
        3 => QchipStatus::Capacity,
        _ => QchipStatus::Internal,
    }
}

fn fail(err: Error) -> QchipStatus {
    let code = status_of(&err);
    set_error(err.to_string());
    code
}

/// Runs a closure, translating panics into `Internal` instead of unwinding.
fn guarded(f: impl FnOnce() -> QchipStatus) -> QchipStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(code) => code,
        Err(_) => {
            set_error("internal panic");
            QchipStatus::Internal
        }
    }
}

unsafe fn read_str<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, QchipStatus> {
    if ptr.is_null() {
        set_error(format!("{what} is null"));
        return Err(QchipStatus::NullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        QchipStatus::Utf8
    })
}

/// Copies `text` into (`buf`, `cap`) as NUL-terminated UTF-8. `*needed` is
/// always set to the full size including the terminator.
unsafe fn write_str(
    text: &str,
    buf: *mut c_char,
    cap: usize,
    needed: *mut usize,
) -> QchipStatus {
    if !needed.is_null() {
        *needed = text.len() + 1;
    }
    if buf.is_null() || cap < text.len() + 1 {
        set_error(format!("buffer of {cap} bytes cannot hold {} bytes", text.len() + 1));
        return QchipStatus::BufferTooSmall;
    }
    std::ptr::copy_nonoverlapping(text.as_ptr(), buf as *mut u8, text.len());
    *buf.add(text.len()) = 0;
    QchipStatus::Ok
}

/// Fetches the message set by the last failing call on this thread.
///
/// # Safety
/// `buf` must point to `cap` writable bytes (or be null to only query the
/// needed size); `needed` may be null.
#[no_mangle]
pub unsafe extern "C" fn qchip_last_error_message(
    buf: *mut c_char,
    cap: usize,
    needed: *mut usize,
) -> QchipStatus {
    let msg = LAST_ERROR.with(|e| e.borrow().clone());
    write_str(&msg, buf, cap, needed)
}

/// Builds a layout for a named topology with a jittered synthetic global
/// placement (`noise_cells` Gaussian sigma, `seed` deterministic).
///
/// # Safety
/// `topology` must be a NUL-terminated string; `out` must be a valid pointer.
/// On success `*out` owns the layout; release it with `qchip_layout_free`.
#[no_mangle]
pub unsafe extern "C" fn qchip_layout_from_topology(
    topology: *const c_char,
    seed: u64,
    noise_cells: f64,
    out: *mut *mut QchipLayout,
) -> QchipStatus {
    guarded(|| {
        if out.is_null() {
            set_error("out is null");
            return QchipStatus::NullPointer;
        }
        let name = match read_str(topology, "topology") {
            Ok(s) => s,
            Err(code) => return code,
        };
        let cfg = EngineConfig::default();
        let built = TopologySpec::parse(name)
            .and_then(|spec| gen_topology(&spec, &cfg.geometry))
            .and_then(|net| {
                let w = substrate_cells(&net, &cfg.geometry);
                Layout::new(net, cfg.geometry.pitch_um, w, w)
            })
            .and_then(|mut layout| {
                synthetic_gp(&mut layout, seed, noise_cells)?;
                Ok(layout)
            });
        match built {
            Ok(layout) => {
                *out = Box::into_raw(Box::new(QchipLayout { inner: layout, cfg, seed }));
                QchipStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Releases a layout handle. Null is a no-op.
///
/// # Safety
/// `layout` must be a pointer previously returned by this library, not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn qchip_layout_free(layout: *mut QchipLayout) {
    if !layout.is_null() {
        drop(Box::from_raw(layout));
    }
}

/// Legalizes the layout in place with the named engine (`qgdp`, `tetris`,
/// `abacus`, `q-tetris`, `q-abacus`); `with_dp` appends the detailed placer.
///
/// # Safety
/// `layout` must be a live handle; `engine` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn qchip_legalize(
    layout: *mut QchipLayout,
    engine: *const c_char,
    with_dp: bool,
) -> QchipStatus {
    guarded(|| {
        let Some(handle) = layout.as_mut() else {
            set_error("layout is null");
            return QchipStatus::NullPointer;
        };
        let name = match read_str(engine, "engine") {
            Ok(s) => s,
            Err(code) => return code,
        };
        let engine = match Engine::parse(name) {
            Ok(e) => e,
            Err(e) => return fail(e),
        };
        let cfg = handle.cfg.clone();
        match run_pipeline(&mut handle.inner, engine, &cfg, with_dp) {
            Ok(_) => QchipStatus::Ok,
            Err(e) => fail(e),
        }
    })
}

/// Counts legality violations at the layout's achieved qubit spacing.
///
/// # Safety
/// `layout` must be a live handle; `count` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qchip_violation_count(
    layout: *const QchipLayout,
    count: *mut u64,
) -> QchipStatus {
    guarded(|| {
        let Some(handle) = layout.as_ref() else {
            set_error("layout is null");
            return QchipStatus::NullPointer;
        };
        if count.is_null() {
            set_error("count is null");
            return QchipStatus::NullPointer;
        }
        let spacing = handle.inner.qubit_spacing_cells.unwrap_or(0);
        *count = validate(&handle.inner, spacing).entries.len() as u64;
        QchipStatus::Ok
    })
}

/// Serializes the metrics report as JSON into (`buf`, `cap`).
///
/// # Safety
/// Buffer contract as in `qchip_last_error_message`.
#[no_mangle]
pub unsafe extern "C" fn qchip_metrics_json(
    layout: *const QchipLayout,
    buf: *mut c_char,
    cap: usize,
    needed: *mut usize,
) -> QchipStatus {
    guarded(|| {
        let Some(handle) = layout.as_ref() else {
            set_error("layout is null");
            return QchipStatus::NullPointer;
        };
        let json = metrics_report(&handle.inner, &handle.cfg, handle.seed)
            .and_then(|rep| report_json(&rep, &handle.cfg));
        match json {
            Ok(v) => write_str(&v.to_string(), buf, cap, needed),
            Err(e) => fail(e),
        }
    })
}

/// Writes the current placement to `path` as a placement file (`stage` 0 =
/// gp, 1 = legalized, 2 = detailed-placed).
///
/// # Safety
/// `layout` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn qchip_save_placement(
    layout: *const QchipLayout,
    stage: u32,
    path: *const c_char,
) -> QchipStatus {
    guarded(|| {
        let Some(handle) = layout.as_ref() else {
            set_error("layout is null");
            return QchipStatus::NullPointer;
        };
        let path = match read_str(path, "path") {
            Ok(s) => s,
            Err(code) => return code,
        };
        let stage = match stage {
            0 => Stage::Gp,
            1 => Stage::Lg,
            2 => Stage::Dp,
            other => {
                set_error(format!("stage {other} out of range (0..=2)"));
                return QchipStatus::InvalidInput;
            }
        };
        let file =
            placement_from_layout(&handle.inner, stage, handle.inner.qubit_spacing_cells);
        match save_placement(Path::new(path), &file) {
            Ok(()) => QchipStatus::Ok,
            Err(e) => fail(e),
        }
    })
}
