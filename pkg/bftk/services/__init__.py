# Measures, certificates and campaigns
