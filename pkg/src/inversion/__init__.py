"""Recovery of twists, boundaries and whole surfaces from curve lengths."""
