//! MAC superframe: beacon slot, contention access period and a
//! contention-free period of guaranteed time slots, allocated first fit in
//! request order.

/// A guaranteed time slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gts {
    pub owner: u64,
    pub start_slot: usize,
    pub slot_count: usize,
}

impl Gts {
    pub fn end_slot(&self) -> usize {
        self.start_slot + self.slot_count
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Superframe {
    pub total_slots: usize,
    /// First slot of the contention-free period. Slot 0 is the beacon and
    /// `1..cfp_start` the contention access period.
    pub cfp_start: usize,
    pub gts: Vec<Gts>,
    /// Requests that did not fit, as `(owner, slots)`.
    pub rejected: Vec<(u64, usize)>,
}

impl Superframe {
    pub fn beacon_slot(&self) -> usize {
        0
    }

    pub fn cap_slots(&self) -> std::ops::Range<usize> {
        1..self.cfp_start
    }

    /// Slots assigned to `owner`.
    pub fn slots_of(&self, owner: u64) -> Vec<usize> {
        self.gts
            .iter()
            .filter(|g| g.owner == owner)
            .flat_map(|g| g.start_slot..g.end_slot())
            .collect()
    }

    /// GTS intervals are pairwise disjoint and inside the CFP.
    pub fn is_consistent(&self) -> bool {
        let mut spans: Vec<(usize, usize)> =
            self.gts.iter().map(|g| (g.start_slot, g.end_slot())).collect();
        spans.sort();
        spans.iter().all(|&(s, e)| s >= self.cfp_start && e <= self.total_slots && s < e)
            && spans.windows(2).all(|w| w[0].1 <= w[1].0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperframeError(pub String);

impl std::fmt::Display for SuperframeError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for SuperframeError {}

/// Grants each `(owner, slots)` request the next free run of slots, or
/// rejects it when the CFP has too few slots left. Zero-slot requests are
/// rejected.
pub fn build_superframe(
    requests: &[(u64, usize)],
    total_slots: usize,
    cfp_start: usize,
) -> Result<Superframe, SuperframeError> {
    if cfp_start < 1 || cfp_start >= total_slots {
        return Err(SuperframeError(format!(
            "need total_slots > cfp_start >= 1, got total {total_slots}, cfp_start {cfp_start}"
        )));
    }
    let mut next = cfp_start;
    let mut gts = Vec::new();
    let mut rejected = Vec::new();
    for &(owner, slots) in requests {
        if slots == 0 || slots > total_slots - next {
            rejected.push((owner, slots));
        } else {
            gts.push(Gts {
                owner,
                start_slot: next,
                slot_count: slots,
            });
            next += slots;
        }
    }
    Ok(Superframe {
        total_slots,
        cfp_start,
        gts,
        rejected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn first_fit_example() {
        let sf = build_superframe(&[(0xA, 2), (0xB, 3)], 10, 5).unwrap();
        assert_eq!(sf.slots_of(0xA), vec![5, 6]);
        assert_eq!(sf.slots_of(0xB), vec![7, 8, 9]);
        assert!(sf.rejected.is_empty());
        assert_eq!(sf.cap_slots(), 1..5);
    }

    #[test]
    fn oversize_request_rejected_prior_kept() {
        let sf = build_superframe(&[(1, 3), (2, 4), (3, 2)], 10, 5).unwrap();
        assert_eq!(sf.slots_of(1), vec![5, 6, 7]);
        assert_eq!(sf.rejected, vec![(2, 4)]);
        assert_eq!(sf.slots_of(3), vec![8, 9]);
    }

    #[test]
    fn empty_requests_beacon_only() {
        let sf = build_superframe(&[], 16, 1).unwrap();
        assert!(sf.gts.is_empty() && sf.rejected.is_empty());
        assert_eq!(sf.beacon_slot(), 0);
        assert!(build_superframe(&[], 4, 0).is_err());
        assert!(build_superframe(&[], 4, 4).is_err());
    }

    proptest! {
        #[test]
        fn gts_always_disjoint(
            reqs in proptest::collection::vec((0u64..50, 0usize..8), 0..40),
            total in 2usize..64,
            cfp in 1usize..63,
        ) {
            prop_assume!(cfp < total);
            let sf = build_superframe(&reqs, total, cfp).unwrap();
            prop_assert!(sf.is_consistent());
            prop_assert_eq!(sf.gts.len() + sf.rejected.len(), reqs.len());
        }
    }
}
