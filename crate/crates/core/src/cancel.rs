//! Cooperative cancellation for the long enumeration kernels.
//!
//! Transporter searches and group scans are factorial in the worst case.
//! A controller thread may call [`request`]; the enumeration loops poll
//! the flag and the running operation returns [`crate::Error::Interrupted`]
//! instead of a partial result. The flag is process-wide and stays set
//! until [`clear`] is called.

use std::sync::atomic::{AtomicBool, Ordering};

static CANCEL: AtomicBool = AtomicBool::new(false);

/// Ask running enumerations to stop at their next checkpoint.
pub fn request() {
    CANCEL.store(true, Ordering::SeqCst);
}

/// Re-arm the library after a cancellation.
pub fn clear() {
    CANCEL.store(false, Ordering::SeqCst);
}

pub fn is_requested() -> bool {
    CANCEL.load(Ordering::Relaxed)
}

pub(crate) fn checkpoint() -> crate::Result<()> {
    if is_requested() {
        Err(crate::Error::Interrupted)
    } else {
        Ok(())
    }
}
