"""Two-player card-gathering grid game plus the pragmatics pipeline built on it.

The package has three layers:

* game world: ``cards``, ``engine``, ``straights`` -- the deterministic
  board game (gather six consecutive same-suit cards, three per hand).
* data pipeline: ``transcripts``, ``commonground``, ``corpus``,
  ``features``, ``model``, ``simulator`` -- turn game transcripts into
  labeled instances of "did the addressee act on a location statement?",
  featurize them against the established common ground, and train/evaluate
  a logistic-regression classifier.
* live play: ``agent``, ``server``, ``cli`` -- a session server hosting
  human-vs-agent games where the agent uses the classifier to decide when
  a location statement is really a request.
"""

__version__ = "0.1.0"
