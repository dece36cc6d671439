//! Local broadcast delivery at the end of a tick.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::controllers::{Broadcast, Message};
use crate::index::RobotIndex;

/// Builds next tick's inboxes. Robot `j` receives sender `i`'s payload iff
/// `i != j` and their centers are at most the sender's radius apart.
/// Inboxes come out sorted by sender id.
pub fn deliver_messages(index: &RobotIndex, outboxes: &[Option<Broadcast>]) -> Vec<Vec<Message>> {
    let mut inboxes: Vec<Vec<Message>> = (0..index.len()).map(|_| Vec::new()).collect();
    deliver_into(index, outboxes, &mut inboxes);
    inboxes
}

/// Like [`deliver_messages`], reusing `inboxes` (cleared first). Returns the
/// number of messages delivered.
pub fn deliver_into(
    index: &RobotIndex,
    outboxes: &[Option<Broadcast>],
    inboxes: &mut Vec<Vec<Message>>,
) -> u64 {
    inboxes.resize_with(index.len(), Vec::new);
    inboxes.iter_mut().for_each(Vec::clear);
    let mut delivered = 0;
    for (sender, out) in outboxes.iter().enumerate() {
        let Some(b) = out else { continue };
        let sender = sender as u32;
        let payload: Arc<[u8]> = Arc::from(b.payload.as_slice());
        let p = index.position(sender);
        // Senders are visited in ascending order, so every inbox stays sorted.
        index.for_each_within(p, b.radius, Some(sender), |j| {
            inboxes[j as usize].push(Message {
                sender,
                payload: payload.clone(),
            });
            delivered += 1;
        });
    }
    delivered
}
