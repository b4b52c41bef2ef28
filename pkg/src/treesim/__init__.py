"""Strategic similarity of game positions from their local game trees."""
