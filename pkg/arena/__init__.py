"""Walled rectangular arena: geometry, kinematics, ray casting, collisions."""
