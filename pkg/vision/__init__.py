"""Linear camera model producing processed (depth-like) pixel readings."""
