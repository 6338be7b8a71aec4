//! In-memory game sessions between a human and the engine.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use delnim_core::{apply, is_terminal, legal_moves, winning_move, MoveRecord, Position, Result, Ruleset};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Player {
    Human,
    Engine,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ongoing,
    HumanLost,
    HumanWon,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Ply {
    pub player: Player,
    #[serde(rename = "move")]
    pub record: MoveRecord,
    pub result: Position,
}

#[derive(Clone, Debug, Serialize)]
pub struct GameSession {
    pub id: String,
    pub ruleset: Ruleset,
    pub initial: Position,
    pub position: Position,
    pub history: Vec<Ply>,
    pub status: Status,
    pub to_move: Player,
}

/// What went wrong with a session mutation, before mapping to HTTP.
#[derive(Debug)]
pub enum MoveError {
    GameOver,
    OutOfTurn(Player),
    Rejected(delnim_core::Error),
}

impl From<delnim_core::Error> for MoveError {
    fn from(e: delnim_core::Error) -> Self {
        MoveError::Rejected(e)
    }
}

impl GameSession {
    pub fn new(id: String, ruleset: Ruleset, initial: Position, first: Player) -> Self {
        let mut session = GameSession {
            id,
            ruleset,
            position: initial.clone(),
            initial,
            history: Vec::new(),
            status: Status::Ongoing,
            to_move: first,
        };
        session.settle();
        session
    }

    /// The player to move at a terminal position loses.
    fn settle(&mut self) {
        if is_terminal(self.ruleset, &self.position) {
            self.status = match self.to_move {
                Player::Human => Status::HumanLost,
                Player::Engine => Status::HumanWon,
            };
        }
    }

    fn play(&mut self, player: Player, record: MoveRecord, result: Position) {
        self.history.push(Ply { player, record, result: result.clone() });
        self.position = result;
        self.to_move = match player {
            Player::Human => Player::Engine,
            Player::Engine => Player::Human,
        };
        self.settle();
    }

    fn ready(&self, player: Player) -> std::result::Result<(), MoveError> {
        if self.status != Status::Ongoing {
            return Err(MoveError::GameOver);
        }
        if self.to_move != player {
            return Err(MoveError::OutOfTurn(self.to_move));
        }
        Ok(())
    }

    pub fn human_move(&mut self, record: MoveRecord) -> std::result::Result<(), MoveError> {
        self.ready(Player::Human)?;
        let record = record.normalized();
        let result = apply(self.ruleset, &self.position, &record)?;
        self.play(Player::Human, record, result);
        Ok(())
    }

    /// Plays the engine's reply. Returns `true` when the engine stood on a
    /// P-position and had to play its first legal move.
    pub fn engine_move(&mut self) -> std::result::Result<bool, MoveError> {
        self.ready(Player::Engine)?;
        let (choice, losing) = match winning_move(self.ruleset, &self.position)? {
            Some(choice) => (choice, false),
            None => {
                let first = legal_moves(self.ruleset, &self.position)?
                    .into_iter()
                    .next()
                    .expect("ongoing game has a legal move");
                (first, true)
            }
        };
        self.play(Player::Engine, choice.record, choice.result);
        Ok(losing)
    }

    /// Replays the history from the initial position.
    pub fn replay(&self) -> Result<Position> {
        let mut p = self.initial.clone();
        for ply in &self.history {
            p = apply(self.ruleset, &p, &ply.record)?;
        }
        Ok(p)
    }
}

struct Slot {
    session: Arc<Mutex<GameSession>>,
    touched: Instant,
}

/// Session table with idle-time eviction.
pub struct SessionStore {
    slots: Mutex<HashMap<String, Slot>>,
    ttl: Duration,
}

impl SessionStore {
    pub fn new(ttl: Duration) -> Self {
        SessionStore { slots: Mutex::new(HashMap::new()), ttl }
    }

    pub fn insert(&self, session: GameSession) -> Arc<Mutex<GameSession>> {
        let id = session.id.clone();
        let session = Arc::new(Mutex::new(session));
        let mut slots = self.slots.lock().expect("session table poisoned");
        self.evict(&mut slots);
        slots.insert(id, Slot { session: session.clone(), touched: Instant::now() });
        session
    }

    pub fn get(&self, id: &str) -> Option<Arc<Mutex<GameSession>>> {
        let mut slots = self.slots.lock().expect("session table poisoned");
        self.evict(&mut slots);
        let slot = slots.get_mut(id)?;
        slot.touched = Instant::now();
        Some(slot.session.clone())
    }

    pub fn len(&self) -> usize {
        self.slots.lock().expect("session table poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn evict(&self, slots: &mut HashMap<String, Slot>) {
        let ttl = self.ttl;
        slots.retain(|_, slot| slot.touched.elapsed() < ttl);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use delnim_core::canonicalize;

    fn session(code: &str, heaps: &[i64], first: Player) -> GameSession {
        let r: Ruleset = code.parse().unwrap();
        GameSession::new("t".into(), r, canonicalize(heaps, r).unwrap(), first)
    }

    #[test]
    fn terminal_start_decides_the_game() {
        assert_eq!(session("single:3", &[1, 1, 1], Player::Human).status, Status::HumanLost);
        assert_eq!(session("single:3", &[1, 1, 1], Player::Engine).status, Status::HumanWon);
    }

    #[test]
    fn engine_reaches_p() {
        let mut s = session("nmth:3", &[2, 3, 5], Player::Engine);
        assert!(!s.engine_move().unwrap());
        assert_eq!(s.position.heaps(), &[1, 1, 3]);
        assert_eq!(s.to_move, Player::Human);
        assert!(matches!(s.engine_move(), Err(MoveError::OutOfTurn(Player::Human))));
        assert_eq!(s.replay().unwrap(), s.position);
    }

    #[test]
    fn eviction_drops_idle_sessions() {
        let store = SessionStore::new(Duration::ZERO);
        store.insert(session("vdn", &[3, 5], Player::Human));
        assert!(store.get("t").is_none());
        assert!(store.is_empty());
    }
}
