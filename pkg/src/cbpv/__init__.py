"""Call-by-push-value semantics and logical relations on finite models."""
